#include "attnrank/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "attnrank/eval.hpp"
#include "attnrank/icr.hpp"
#include "attnrank/parallel.hpp"
#include "json.hpp"

namespace attnrank {

namespace {

using json = nlohmann::json;

constexpr const char* kModelName = "synthetic-gaussian";

// Cumulative grade distribution for drawn relevance: P(3)=.03, P(2)=.07,
// P(1)=.15, rest non-relevant.
int draw_grade(std::mt19937_64& rng) {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  if (u < 0.03) return 3;
  if (u < 0.10) return 2;
  if (u < 0.25) return 1;
  return 0;
}

template <typename T>
void read_field(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) {
    try {
      out = it->get<T>();
    } catch (const json::exception&) {
      throw Error(std::string("config field '") + key + "' has the wrong type");
    }
  }
}

}  // namespace

void SynthConfig::validate() const {
  if (num_layers == 0 || num_docs == 0 || num_queries == 0) {
    throw Error("layer, document and query counts must be positive");
  }
  if (head_count == 0 || query_token_count == 0) {
    throw Error("head and query token counts must be positive");
  }
  if (peak_layer >= num_layers) throw Error("peak_layer must be below num_layers");
  if (!(signal_width > 0.0)) throw Error("signal_width must be positive");
  if (signal_strength < 0.0 || boundary_noise < 0.0 || jitter < 0.0 || layer_noise < 0.0 ||
      base_mass < 0.0 || position_bias < 0.0) {
    throw Error("signal and noise magnitudes must be non-negative");
  }
  if (!(boundary_decay > 0.0)) throw Error("boundary_decay must be positive");
  if (k == 0) throw Error("k must be positive");
  // The content-free pass alone must fit under the per-layer attention budget.
  const double worst_base =
      static_cast<double>(num_docs) * base_mass * 1.5 * (1.0 + position_bias);
  const double bound = static_cast<double>(head_count) * query_token_count;
  if (worst_base > bound) {
    throw Error("base attention mass " + std::to_string(worst_base) +
                " cannot fit the per-layer bound " + std::to_string(bound));
  }
}

SynthConfig parse_synth_config(const std::string& json_text) {
  const json j = json::parse(json_text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error("synthetic config is not a JSON object");
  SynthConfig c;
  read_field(j, "num_layers", c.num_layers);
  read_field(j, "num_docs", c.num_docs);
  read_field(j, "num_queries", c.num_queries);
  read_field(j, "peak_layer", c.peak_layer);
  read_field(j, "signal_width", c.signal_width);
  read_field(j, "signal_strength", c.signal_strength);
  read_field(j, "boundary_noise", c.boundary_noise);
  read_field(j, "boundary_decay", c.boundary_decay);
  read_field(j, "jitter", c.jitter);
  read_field(j, "layer_noise", c.layer_noise);
  read_field(j, "base_mass", c.base_mass);
  read_field(j, "position_bias", c.position_bias);
  read_field(j, "head_count", c.head_count);
  read_field(j, "query_token_count", c.query_token_count);
  read_field(j, "seed", c.seed);
  read_field(j, "k", c.k);
  read_field(j, "smoothing_window", c.smoothing_window);
  read_field(j, "interval_width", c.interval_width);
  c.validate();
  return c;
}

std::string format_synth_config(const SynthConfig& c) {
  json j{{"num_layers", c.num_layers},
         {"num_docs", c.num_docs},
         {"num_queries", c.num_queries},
         {"peak_layer", c.peak_layer},
         {"signal_width", c.signal_width},
         {"signal_strength", c.signal_strength},
         {"boundary_noise", c.boundary_noise},
         {"boundary_decay", c.boundary_decay},
         {"jitter", c.jitter},
         {"layer_noise", c.layer_noise},
         {"base_mass", c.base_mass},
         {"position_bias", c.position_bias},
         {"head_count", c.head_count},
         {"query_token_count", c.query_token_count},
         {"seed", c.seed},
         {"k", c.k},
         {"smoothing_window", c.smoothing_window},
         {"interval_width", c.interval_width}};
  return j.dump(2) + "\n";
}

std::string synthetic_query_id(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "q%04zu", index);
  return buf;
}

std::string synthetic_doc_id(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "d%03zu", index);
  return buf;
}

SyntheticQuery gen_synthetic_query(const SynthConfig& cfg, std::size_t index) {
  cfg.validate();
  const std::size_t L = cfg.num_layers;
  const std::size_t N = cfg.num_docs;
  std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed),
                    static_cast<std::uint32_t>(cfg.seed >> 32),
                    static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(static_cast<std::uint64_t>(index) >> 32)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  SyntheticQuery q;
  const std::string qid = synthetic_query_id(index);
  std::vector<int> grades(N);
  bool any_relevant = false;
  for (std::size_t d = 0; d < N; ++d) {
    grades[d] = draw_grade(rng);
    any_relevant |= grades[d] > 0;
  }
  if (!any_relevant) {
    grades[static_cast<std::size_t>(unit(rng) * static_cast<double>(N)) % N] = 1;
  }

  std::vector<std::string> ids(N);
  for (std::size_t d = 0; d < N; ++d) {
    ids[d] = synthetic_doc_id(d);
    q.qrels.set(qid, ids[d], grades[d]);
  }
  q.pool = make_pool(ids);

  std::vector<double> boundary_draw(N);
  for (auto& r : boundary_draw) r = unit(rng);

  AttentionDump real;
  real.query_id = qid;
  real.doc_ids = ids;
  real.model_name = kModelName;
  real.num_layers = static_cast<std::uint32_t>(L);
  real.num_heads = cfg.head_count;
  real.query_token_count = cfg.query_token_count;
  real.doc_token_counts.assign(N, 64);
  real.calibration = false;
  real.matrix.assign(L * N, 0.0f);
  AttentionDump null = real;
  null.calibration = true;

  const double bound = real.mass_bound();
  const double denom = N > 1 ? static_cast<double>(N - 1) : 1.0;
  std::vector<double> base(N);
  std::vector<double> extra(N);
  for (std::size_t l = 0; l < L; ++l) {
    const double dl = static_cast<double>(l) - static_cast<double>(cfg.peak_layer);
    const double profile = std::exp(-dl * dl / (2.0 * cfg.signal_width * cfg.signal_width));
    const double edge = static_cast<double>(std::min(l, L - 1 - l));
    const double boundary = std::exp(-edge / cfg.boundary_decay);

    double base_sum = 0.0;
    double extra_sum = 0.0;
    for (std::size_t d = 0; d < N; ++d) {
      const double closeness = static_cast<double>(N - 1 - d) / denom;
      base[d] = cfg.base_mass * (0.5 + unit(rng)) * (1.0 + cfg.position_bias * closeness);
      const double jitter = std::max(0.0, 1.0 + cfg.jitter * normal(rng));
      const double noise = unit(rng);
      extra[d] = cfg.signal_strength * profile * grades[d] * jitter +
                 cfg.boundary_noise * boundary * boundary_draw[d] + cfg.layer_noise * noise;
      base_sum += base[d];
      extra_sum += extra[d];
    }
    // Clip to the per-layer attention budget by shrinking the query-driven part.
    const double scale =
        base_sum + extra_sum > bound && extra_sum > 0.0 ? (bound - base_sum) / extra_sum : 1.0;
    for (std::size_t d = 0; d < N; ++d) {
      const auto b = static_cast<float>(base[d]);
      null.value(l, d) = b;
      real.value(l, d) = b + static_cast<float>(extra[d] * scale);
    }
  }
  q.real = std::move(real);
  q.null = std::move(null);
  return q;
}

SyntheticCorpus gen_synthetic_corpus(const SynthConfig& cfg, std::size_t jobs) {
  cfg.validate();
  std::vector<SyntheticQuery> generated(cfg.num_queries);
  parallel_for(cfg.num_queries, jobs,
               [&](std::size_t i) { generated[i] = gen_synthetic_query(cfg, i); });
  SyntheticCorpus corpus;
  corpus.queries.reserve(generated.size());
  for (auto& g : generated) {
    const std::string qid = g.real.query_id;
    for (const auto& [doc, grade] : g.qrels.judged(qid)) corpus.qrels.set(qid, doc, grade);
    corpus.queries.push_back({std::move(g.real), std::move(g.null), std::move(g.pool)});
  }
  return corpus;
}

std::string to_string(const IntervalPolicy& policy) {
  switch (policy.kind) {
    case PolicyKind::kAll:
      return "all";
    case PolicyKind::kSelective:
      return "selective";
    case PolicyKind::kPeak:
      return "peak";
    case PolicyKind::kFixed:
      return "fixed" + to_string(policy.fixed);
  }
  return "unknown";
}

std::size_t executed_layers(const LayerInterval& interval) { return interval.hi + 1; }

double layer_cost_reduction_pct(const LayerInterval& interval, std::size_t total_layers) {
  check_interval(interval, total_layers);
  const double total = static_cast<double>(total_layers);
  return 100.0 * (total - static_cast<double>(executed_layers(interval))) / total;
}

double mean_ndcg(const SyntheticCorpus& corpus, const LayerInterval& interval, std::size_t k,
                 std::size_t jobs) {
  if (corpus.queries.empty()) throw Error("empty corpus");
  std::vector<double> per_query(corpus.queries.size());
  parallel_for(per_query.size(), jobs, [&](std::size_t i) {
    const auto& q = corpus.queries[i];
    per_query[i] = ndcg_at_k(score_icr(q.real, q.null, interval, q.pool), corpus.qrels, k);
  });
  double sum = 0.0;
  for (double v : per_query) sum += v;
  return sum / static_cast<double>(per_query.size());
}

StudyReport run_study(const SynthConfig& cfg, const SyntheticCorpus& corpus,
                      const std::vector<IntervalPolicy>& policies, std::size_t jobs) {
  StudyReport report;
  report.curve = per_layer_metrics(corpus.queries, corpus.qrels, cfg.k, Gain::kLinear, jobs);
  report.curve.dataset_id = "synthetic";
  report.measured_peak = find_peak(smooth_curve(report.curve, cfg.smoothing_window));

  for (const auto& policy : policies) {
    LayerInterval interval;
    switch (policy.kind) {
      case PolicyKind::kAll:
        interval = {0, cfg.num_layers - 1};
        break;
      case PolicyKind::kPeak:
        interval = {report.measured_peak, report.measured_peak};
        break;
      case PolicyKind::kSelective: {
        PeakReport peaks;
        peaks.total_layers = cfg.num_layers;
        peaks.add("synthetic", report.measured_peak);
        interval = select_interval(peaks, cfg.interval_width);
        break;
      }
      case PolicyKind::kFixed:
        interval = policy.fixed;
        break;
    }
    check_interval(interval, cfg.num_layers);
    StudyRow row;
    row.policy = to_string(policy);
    row.interval = interval;
    row.mean_ndcg = mean_ndcg(corpus, interval, cfg.k, jobs);
    row.executed_layers = executed_layers(interval);
    row.cost_reduction_pct = layer_cost_reduction_pct(interval, cfg.num_layers);
    report.rows.push_back(row);
  }
  return report;
}

StudyReport run_study(const SynthConfig& cfg, const std::vector<IntervalPolicy>& policies,
                      std::size_t jobs) {
  return run_study(cfg, gen_synthetic_corpus(cfg, jobs), policies, jobs);
}

std::string format_study_csv(const StudyReport& report) {
  std::ostringstream os;
  os.precision(6);
  os << std::fixed;
  os << "policy,lo,hi,width,mean_ndcg,executed_layers,cost_reduction_pct\n";
  for (const auto& r : report.rows) {
    os << r.policy << "," << r.interval.lo << "," << r.interval.hi << "," << r.interval.width()
       << "," << r.mean_ndcg << "," << r.executed_layers << "," << r.cost_reduction_pct << "\n";
  }
  return os.str();
}

}  // namespace attnrank
