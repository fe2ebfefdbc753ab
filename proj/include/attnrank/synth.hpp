#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "attnrank/core.hpp"
#include "attnrank/dump.hpp"
#include "attnrank/layers.hpp"

namespace attnrank {

/// Parameters of the synthetic attention generator. For query q, layer l
/// and document d:
///
///   real(l,d) = base(l,d)
///             + strength * exp(-(l-peak)^2 / (2 width^2)) * grade(d) * J(l,d)
///             + boundary_noise * boundary(l) * r(d)
///             + layer_noise * u(l,d)
///   null(l,d) = base(l,d)
///
/// with J = max(0, 1 + jitter * N(0,1)), r, u ~ U(0,1), and
/// boundary(l) = exp(-min(l, L-1-l) / boundary_decay).
struct SynthConfig {
  std::size_t num_layers = 32;
  std::size_t num_docs = 100;
  std::size_t num_queries = 200;
  std::size_t peak_layer = 18;
  double signal_width = 2.0;
  double signal_strength = 1.0;
  double boundary_noise = 0.5;
  double boundary_decay = 8.0;
  double jitter = 0.5;
  double layer_noise = 0.5;
  double base_mass = 1.0;
  double position_bias = 0.5;
  std::uint32_t head_count = 32;
  std::uint32_t query_token_count = 16;
  std::uint64_t seed = 7;
  std::size_t k = 10;                 // nDCG cutoff used by studies
  std::size_t smoothing_window = 3;   // for peak finding in studies
  std::size_t interval_width = 4;     // w for the selective policy

  /// Throws on invalid or infeasible settings.
  void validate() const;
};

SynthConfig parse_synth_config(const std::string& json_text);
std::string format_synth_config(const SynthConfig& cfg);

struct SyntheticQuery {
  AttentionDump real;
  AttentionDump null;
  std::vector<Document> pool;
  RelevanceJudgments qrels;  // this query only
};

std::string synthetic_query_id(std::size_t index);
std::string synthetic_doc_id(std::size_t index);

/// Deterministic in (cfg, index).
SyntheticQuery gen_synthetic_query(const SynthConfig& cfg, std::size_t index);

struct SyntheticCorpus {
  std::vector<QueryDumps> queries;
  RelevanceJudgments qrels;
};

/// Generates cfg.num_queries queries using up to `jobs` threads.
SyntheticCorpus gen_synthetic_corpus(const SynthConfig& cfg, std::size_t jobs = 1);

enum class PolicyKind { kAll, kSelective, kPeak, kFixed };

struct IntervalPolicy {
  PolicyKind kind = PolicyKind::kAll;
  LayerInterval fixed;  // kFixed only

  static IntervalPolicy all() { return {PolicyKind::kAll, {}}; }
  static IntervalPolicy selective() { return {PolicyKind::kSelective, {}}; }
  static IntervalPolicy peak() { return {PolicyKind::kPeak, {}}; }
  static IntervalPolicy fixed_interval(LayerInterval i) { return {PolicyKind::kFixed, i}; }
};

std::string to_string(const IntervalPolicy& policy);

/// Layers a forward pass must run to score with `interval` (early exit at hi).
std::size_t executed_layers(const LayerInterval& interval);

/// 100 * (L - executed) / L.
double layer_cost_reduction_pct(const LayerInterval& interval, std::size_t total_layers);

struct StudyRow {
  std::string policy;
  LayerInterval interval;
  double mean_ndcg = 0.0;
  std::size_t executed_layers = 0;
  double cost_reduction_pct = 0.0;  // versus running all layers
};

struct StudyReport {
  LayerCurve curve;        // measured, unsmoothed
  std::size_t measured_peak = 0;
  std::vector<StudyRow> rows;
};

/// Runs every policy over one synthetic corpus. Selective and Peak are
/// derived from the measured per-layer curve (smoothed by
/// cfg.smoothing_window before peak finding).
StudyReport run_study(const SynthConfig& cfg, const std::vector<IntervalPolicy>& policies,
                      std::size_t jobs = 1);
StudyReport run_study(const SynthConfig& cfg, const SyntheticCorpus& corpus,
                      const std::vector<IntervalPolicy>& policies, std::size_t jobs = 1);

/// Mean nDCG@k of one fixed interval over a corpus.
double mean_ndcg(const SyntheticCorpus& corpus, const LayerInterval& interval, std::size_t k,
                 std::size_t jobs = 1);

/// CSV: policy,lo,hi,width,mean_ndcg,executed_layers,cost_reduction_pct
std::string format_study_csv(const StudyReport& report);

}  // namespace attnrank
