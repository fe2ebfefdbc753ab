#include "attnrank/eval.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "attnrank/io.hpp"

namespace attnrank {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    fn(++line_no, line);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::string format_score(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

double gain_of(int grade, Gain gain) {
  return gain == Gain::kLinear ? static_cast<double>(grade) : std::exp2(grade) - 1.0;
}

}  // namespace

RelevanceJudgments parse_qrels(std::string_view text, std::vector<std::string>* warnings) {
  RelevanceJudgments qrels;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    const auto fields = split_ws(line);
    if (fields.empty()) return;
    const std::string where = "qrels line " + std::to_string(line_no);
    if (fields.size() != 4) {
      throw FormatError(where + ": expected 4 fields, got " + std::to_string(fields.size()));
    }
    int grade = 0;
    if (!parse_number(fields[3], grade)) {
      throw FormatError(where + ": non-integer grade '" + std::string(fields[3]) + "'");
    }
    if (grade < 0) throw FormatError(where + ": negative grade");
    const std::string q(fields[0]);
    const std::string d(fields[2]);
    if (warnings != nullptr && qrels.contains(q, d)) {
      warnings->push_back(where + ": duplicate judgment for (" + q + ", " + d +
                          "), keeping the last one");
    }
    qrels.set(q, d, grade);
  });
  return qrels;
}

RelevanceJudgments read_qrels_file(const std::string& path, std::vector<std::string>* warnings) {
  return parse_qrels(read_text_file(path), warnings);
}

std::string format_qrels(const RelevanceJudgments& qrels) {
  std::string out;
  for (const auto& q : qrels.query_ids()) {
    for (const auto& [d, grade] : qrels.judged(q)) {
      out += q + " 0 " + d + " " + std::to_string(grade) + "\n";
    }
  }
  return out;
}

double ndcg_at_k(const std::string& query_id, const std::vector<std::string>& ranked_ids,
                 const RelevanceJudgments& qrels, std::size_t k, Gain gain) {
  if (k == 0) throw Error("nDCG cutoff k must be at least 1");

  std::vector<int> ideal;
  for (const auto& [_, grade] : qrels.judged(query_id)) ideal.push_back(grade);
  std::sort(ideal.begin(), ideal.end(), std::greater<>());

  double idcg = 0.0;
  for (std::size_t i = 0; i < std::min(k, ideal.size()); ++i) {
    idcg += gain_of(ideal[i], gain) / std::log2(static_cast<double>(i) + 2.0);
  }
  if (idcg <= 0.0) return 0.0;

  double dcg = 0.0;
  for (std::size_t i = 0; i < std::min(k, ranked_ids.size()); ++i) {
    dcg += gain_of(qrels.grade(query_id, ranked_ids[i]), gain) /
           std::log2(static_cast<double>(i) + 2.0);
  }
  return dcg / idcg;
}

double ndcg_at_k(const RankedList& ranked, const RelevanceJudgments& qrels, std::size_t k,
                 Gain gain) {
  return ndcg_at_k(ranked.query_id, ranked.doc_ids(), qrels, k, gain);
}

std::string emit_run(const std::vector<RankedList>& lists, const std::string& tag) {
  if (lists.empty()) throw Error("cannot emit an empty run");
  std::string out;
  for (const auto& list : lists) {
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < list.entries.size(); ++i) {
      const auto& e = list.entries[i];
      if (!seen.insert(e.doc_id).second) {
        throw Error("duplicate doc " + e.doc_id + " in query " + list.query_id);
      }
      out += list.query_id + " Q0 " + e.doc_id + " " + std::to_string(i + 1) + " " +
             format_score(e.score) + " " + tag + "\n";
    }
  }
  return out;
}

std::vector<RankedList> parse_run(std::string_view text) {
  struct Row {
    long rank;
    RankedEntry entry;
  };
  std::vector<std::string> order;
  std::unordered_map<std::string, std::vector<Row>> rows;
  std::unordered_map<std::string, std::string> tags;

  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    const auto f = split_ws(line);
    if (f.empty()) return;
    const std::string where = "run line " + std::to_string(line_no);
    if (f.size() != 6) {
      throw FormatError(where + ": expected 6 fields, got " + std::to_string(f.size()));
    }
    Row row{};
    if (!parse_number(f[3], row.rank) || row.rank < 1) {
      throw FormatError(where + ": bad rank '" + std::string(f[3]) + "'");
    }
    if (!parse_number(f[4], row.entry.score)) {
      throw FormatError(where + ": bad score '" + std::string(f[4]) + "'");
    }
    row.entry.doc_id = std::string(f[2]);
    const std::string q(f[0]);
    auto [it, inserted] = rows.try_emplace(q);
    if (inserted) {
      order.push_back(q);
      tags[q] = std::string(f[5]);
    }
    it->second.push_back(std::move(row));
  });

  std::vector<RankedList> lists;
  lists.reserve(order.size());
  for (const auto& q : order) {
    auto& r = rows[q];
    std::stable_sort(r.begin(), r.end(),
                     [](const Row& a, const Row& b) { return a.rank < b.rank; });
    RankedList list{q, {}, tags[q]};
    std::unordered_set<std::string> seen;
    for (auto& row : r) {
      if (!seen.insert(row.entry.doc_id).second) {
        throw FormatError("duplicate doc " + row.entry.doc_id + " in query " + q);
      }
      list.entries.push_back(std::move(row.entry));
    }
    lists.push_back(std::move(list));
  }
  return lists;
}

std::vector<RankedList> read_run_file(const std::string& path) {
  return parse_run(read_text_file(path));
}

std::string to_string(LatencyStage stage) {
  switch (stage) {
    case LatencyStage::kForwardPass:
      return "forward_pass";
    case LatencyStage::kTotalScoring:
      return "total_scoring";
  }
  return "unknown";
}

LatencyStage parse_latency_stage(const std::string& text) {
  if (text == "forward_pass") return LatencyStage::kForwardPass;
  if (text == "total_scoring") return LatencyStage::kTotalScoring;
  throw FormatError("unknown latency stage '" + text + "'");
}

std::string format_latency_csv(const std::vector<LatencySample>& samples) {
  std::string out = "query_id,stage,seconds,config_tag\n";
  for (const auto& s : samples) {
    out += s.query_id + "," + to_string(s.stage) + "," + format_score(s.seconds) + "," +
           s.config_tag + "\n";
  }
  return out;
}

std::vector<LatencySample> parse_latency_csv(std::string_view text) {
  std::vector<LatencySample> samples;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    if (line.empty()) return;
    std::vector<std::string> f;
    std::string cur;
    for (char ch : line) {
      if (ch == ',') {
        f.push_back(std::move(cur));
        cur.clear();
      } else {
        cur += ch;
      }
    }
    f.push_back(std::move(cur));
    const std::string where = "latency line " + std::to_string(line_no);
    if (f.size() != 4) throw FormatError(where + ": expected 4 columns");
    if (line_no == 1 && f[0] == "query_id") return;
    LatencySample s;
    s.query_id = f[0];
    s.stage = parse_latency_stage(f[1]);
    if (!parse_number(std::string_view(f[2]), s.seconds) || !(s.seconds > 0.0)) {
      throw FormatError(where + ": seconds must be a positive number");
    }
    s.config_tag = f[3];
    samples.push_back(std::move(s));
  });
  return samples;
}

LatencyReport summarize_latency(const std::vector<LatencySample>& samples,
                                const std::string& baseline_tag,
                                const std::string& variant_tag) {
  struct Acc {
    double sum = 0.0;
    std::size_t n = 0;
  };
  std::map<std::pair<LatencyStage, std::string>, Acc> acc;
  bool saw_baseline = false;
  bool saw_variant = false;
  for (const auto& s : samples) {
    if (!(s.seconds > 0.0)) throw Error("latency samples must be positive");
    if (s.config_tag != baseline_tag && s.config_tag != variant_tag) continue;
    saw_baseline |= s.config_tag == baseline_tag;
    saw_variant |= s.config_tag == variant_tag;
    auto& a = acc[{s.stage, s.config_tag}];
    a.sum += s.seconds;
    ++a.n;
  }
  if (!saw_baseline) throw Error("no latency samples for tag '" + baseline_tag + "'");
  if (!saw_variant) throw Error("no latency samples for tag '" + variant_tag + "'");

  LatencyReport report{baseline_tag, variant_tag, {}};
  for (LatencyStage stage : {LatencyStage::kForwardPass, LatencyStage::kTotalScoring}) {
    auto b = acc.find({stage, baseline_tag});
    auto v = acc.find({stage, variant_tag});
    if (b == acc.end() || v == acc.end()) continue;
    StageReduction r{stage, b->second.sum / b->second.n, v->second.sum / v->second.n, 0.0};
    r.reduction_pct = 100.0 * (r.baseline_mean - r.variant_mean) / r.baseline_mean;
    report.stages.push_back(r);
  }
  if (report.stages.empty()) {
    throw Error("tags '" + baseline_tag + "' and '" + variant_tag + "' share no stage");
  }
  return report;
}

}  // namespace attnrank
