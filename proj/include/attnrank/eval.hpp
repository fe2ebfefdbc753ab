#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "attnrank/core.hpp"

namespace attnrank {

/// Gain applied to a relevance grade when computing DCG.
enum class Gain {
  kLinear,       // grade
  kExponential,  // 2^grade - 1
};

/// Parses TREC qrels lines "query_id iteration doc_id grade". Duplicate
/// pairs keep the last grade and append a message to `warnings` if given.
RelevanceJudgments parse_qrels(std::string_view text,
                               std::vector<std::string>* warnings = nullptr);
RelevanceJudgments read_qrels_file(const std::string& path,
                                   std::vector<std::string>* warnings = nullptr);
std::string format_qrels(const RelevanceJudgments& qrels);

/// nDCG at cutoff k. IDCG uses every judged document of the query; returns
/// 0 when the query has no positive judgment.
double ndcg_at_k(const RankedList& ranked, const RelevanceJudgments& qrels, std::size_t k,
                 Gain gain = Gain::kLinear);

/// Same metric over a plain list of doc ids in ranked order.
double ndcg_at_k(const std::string& query_id, const std::vector<std::string>& ranked_ids,
                 const RelevanceJudgments& qrels, std::size_t k, Gain gain = Gain::kLinear);

/// TREC run text: "qid Q0 doc_id rank score tag", ranks from 1.
std::string emit_run(const std::vector<RankedList>& lists, const std::string& tag);

/// Parses a TREC run file. Each query's entries are ordered by the rank
/// column; the tag column becomes method_tag. Queries are returned in
/// first-appearance order.
std::vector<RankedList> parse_run(std::string_view text);
std::vector<RankedList> read_run_file(const std::string& path);

enum class LatencyStage { kForwardPass, kTotalScoring };

std::string to_string(LatencyStage stage);
LatencyStage parse_latency_stage(const std::string& text);

struct LatencySample {
  std::string query_id;
  LatencyStage stage = LatencyStage::kTotalScoring;
  double seconds = 0.0;
  std::string config_tag;
};

/// CSV with header "query_id,stage,seconds,config_tag".
std::string format_latency_csv(const std::vector<LatencySample>& samples);
std::vector<LatencySample> parse_latency_csv(std::string_view text);

struct StageReduction {
  LatencyStage stage;
  double baseline_mean = 0.0;
  double variant_mean = 0.0;
  double reduction_pct = 0.0;
};

struct LatencyReport {
  std::string baseline_tag;
  std::string variant_tag;
  std::vector<StageReduction> stages;
};

/// Per stage: 100 * (mean_baseline - mean_variant) / mean_baseline. Stages
/// missing either tag are left out; a tag absent from every stage is an
/// error.
LatencyReport summarize_latency(const std::vector<LatencySample>& samples,
                                const std::string& baseline_tag,
                                const std::string& variant_tag);

}  // namespace attnrank
