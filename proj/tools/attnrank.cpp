// attnrank: batch driver for attention-based re-ranking experiments.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <regex>
#include <sstream>

#include "CLI11.hpp"
#include "attnrank/adapter.hpp"
#include "attnrank/dump_scorer.hpp"
#include "attnrank/eval.hpp"
#include "attnrank/frameworks.hpp"
#include "attnrank/icr.hpp"
#include "attnrank/io.hpp"
#include "attnrank/layers.hpp"
#include "attnrank/parallel.hpp"
#include "attnrank/plot.hpp"
#include "attnrank/run_config.hpp"
#include "attnrank/synth.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace attnrank;

namespace {

// Reads --config files: a JSON object whose scalar members name long
// options, with nested objects holding the options of a subcommand.
class JsonConfig final : public CLI::Config {
 public:
  std::string to_config(const CLI::App*, bool, bool, std::string) const override {
    return "{}\n";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw CLI::ConversionError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config must be a JSON object");
    std::vector<CLI::ConfigItem> items;
    collect(j, {}, items);
    return items;
  }

 private:
  static void collect(const nlohmann::json& obj, const std::vector<std::string>& parents,
                      std::vector<CLI::ConfigItem>& items) {
    for (const auto& [key, value] : obj.items()) {
      if (value.is_object()) {
        auto nested = parents;
        nested.push_back(key);
        collect(value, nested, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(scalar(v, key));
      } else {
        item.inputs.push_back(scalar(value, key));
      }
      items.push_back(std::move(item));
    }
  }

  static std::string scalar(const nlohmann::json& v, const std::string& key) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    throw CLI::ConversionError("config value for '" + key + "' must be a scalar or a list");
  }
};

std::size_t default_jobs() {
  if (const char* env = std::getenv("ATTNRANK_JOBS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
    std::cerr << "warning: ignoring ATTNRANK_JOBS=" << env << "\n";
  }
  return 1;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
  } else {
    write_text_file(path, text);
  }
}

// Whole-pool dumps in a directory: <qid>.icra, skipping null and subset files.
std::vector<std::string> list_dump_queries(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw MissingFile(dir);
  static const std::regex subset(R"(.*\.[0-9a-f]{16})");
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (entry.path().extension() != ".icra") continue;
    const std::string stem = name.substr(0, name.size() - 5);
    if (stem.size() > 5 && stem.compare(stem.size() - 5, 5, ".null") == 0) continue;
    if (std::regex_match(stem, subset)) continue;
    ids.push_back(stem);
  }
  std::sort(ids.begin(), ids.end());
  if (ids.empty()) throw Error("no dumps found in " + dir.string());
  return ids;
}

struct Pools {
  std::vector<std::string> query_ids;  // output order
  std::map<std::string, std::vector<Document>> docs;
};

// First-stage candidates from a run file, or from the dumps' document order.
Pools load_pools(const std::string& pools_path, const std::string& dumps_dir,
                 const std::string& docs_path) {
  Pools p;
  if (!pools_path.empty()) {
    for (const auto& list : read_run_file(pools_path)) {
      p.query_ids.push_back(list.query_id);
      p.docs[list.query_id] = make_pool(list.doc_ids());
    }
  } else if (!dumps_dir.empty()) {
    DumpStore store(dumps_dir);
    for (const auto& qid : list_dump_queries(dumps_dir)) {
      p.query_ids.push_back(qid);
      p.docs[qid] = make_pool(store.whole(qid, false).real->doc_ids);
    }
  } else {
    throw Error("need --pools or --dumps to know the candidate lists");
  }
  if (!docs_path.empty()) {
    const auto texts = parse_id_text_tsv(read_text_file(docs_path));
    for (auto& [qid, pool] : p.docs) {
      for (auto& d : pool) {
        auto it = texts.find(d.id);
        if (it == texts.end()) throw Error("no text for document " + d.id);
        d.text = it->second;
      }
    }
  }
  return p;
}

std::vector<LayerCurve> load_curves(const std::vector<std::string>& paths) {
  std::vector<LayerCurve> curves;
  for (const auto& path : paths) curves.push_back(read_curve_file(path));
  return curves;
}

Gain parse_gain(const std::string& name) {
  if (name == "linear") return Gain::kLinear;
  if (name == "exponential") return Gain::kExponential;
  throw Error("unknown gain '" + name + "'");
}

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

// ---------------------------------------------------------------------------

struct Common {
  std::size_t jobs = 1;
  std::uint64_t seed = 7;
};

struct ScoreArgs {
  std::string dumps, pools, interval = "all", output, tag;
  std::vector<std::string> curves;
  std::size_t smooth = 3;
  bool no_calibration = false;
};

int run_score(const ScoreArgs& a, const Common& common) {
  const IntervalSpec spec = parse_interval_spec(a.interval);
  const Pools pools = load_pools(a.pools, a.dumps, "");
  DumpStore store(a.dumps);
  const bool calibrated = !a.no_calibration;
  const auto curves = load_curves(a.curves);

  std::vector<RankedList> lists(pools.query_ids.size());
  std::optional<LayerInterval> interval;
  std::mutex interval_mutex;
  parallel_for(lists.size(), common.jobs, [&](std::size_t i) {
    const std::string& qid = pools.query_ids[i];
    const auto pair = store.whole(qid, calibrated);
    const LayerInterval iv = resolve_interval(spec, pair.real->num_layers, curves, a.smooth);
    {
      std::lock_guard lock(interval_mutex);
      if (interval && !(*interval == iv)) throw Error("dumps disagree on the number of layers");
      interval = iv;
    }
    std::optional<AttentionDump> null;
    if (calibrated) null = *pair.null;
    lists[i] = score_icr(*pair.real, null, iv, pools.docs.at(qid));
  });
  emit(a.output, emit_run(lists, a.tag.empty() ? icr_tag(*interval, calibrated) : a.tag));
  return 0;
}

struct SweepArgs {
  std::string dumps, pools, qrels, output, dataset, gain = "linear";
  std::size_t k = 10;
  bool no_calibration = false;
};

int run_sweep(const SweepArgs& a, const Common& common) {
  const auto qrels = read_qrels_file(a.qrels);
  const Pools pools = load_pools(a.pools, a.dumps, "");
  DumpStore store(a.dumps);
  const bool calibrated = !a.no_calibration;

  std::vector<std::string> ids;
  for (const auto& qid : pools.query_ids) {
    if (qrels.has_query(qid)) ids.push_back(qid);
  }
  if (ids.empty()) throw Error("no query has both dumps and relevance judgments");
  std::vector<QueryDumps> queries(ids.size());
  parallel_for(ids.size(), common.jobs, [&](std::size_t i) {
    const auto pair = store.whole(ids[i], calibrated);
    queries[i].real = *pair.real;
    if (calibrated) queries[i].null = *pair.null;
    queries[i].pool = pools.docs.at(ids[i]);
  });
  LayerCurve curve = per_layer_metrics(queries, qrels, a.k, parse_gain(a.gain), common.jobs);
  std::cerr << "sweep: " << ids.size() << " queries, " << curve.num_layers()
            << " layers, raw peak at layer " << find_peak(curve) << "\n";
  emit(a.output, format_curve_csv(curve));
  return 0;
}

struct SelectArgs {
  std::vector<std::size_t> peaks;
  std::vector<std::string> curves;
  std::size_t layers = 0;
  std::size_t width = 4;
  std::size_t smooth = 1;
};

int run_select(const SelectArgs& a) {
  PeakReport report;
  report.total_layers = a.layers;
  if (!a.peaks.empty() && !a.curves.empty()) throw Error("give either --peaks or --curves");
  if (!a.peaks.empty()) {
    if (a.layers == 0) throw Error("--peaks needs --layers");
    for (std::size_t i = 0; i < a.peaks.size(); ++i) report.add(std::to_string(i), a.peaks[i]);
  } else if (!a.curves.empty()) {
    for (const auto& curve : load_curves(a.curves)) {
      if (report.total_layers == 0) report.total_layers = curve.num_layers();
      if (curve.num_layers() != report.total_layers) {
        throw Error("curve " + curve.dataset_id + " has " + std::to_string(curve.num_layers()) +
                    " layers, expected " + std::to_string(report.total_layers));
      }
      const std::size_t peak =
          find_peak(a.smooth > 1 ? smooth_curve(curve, a.smooth) : curve);
      report.add(curve.dataset_id, peak);
      std::cerr << "peak of " << curve.dataset_id << ": layer " << peak << "\n";
    }
  } else {
    throw Error("give --peaks or --curves");
  }
  IntervalTrace trace;
  const LayerInterval interval = select_interval(report, a.width, &trace);
  std::cerr << trace.describe();
  std::cout << interval.lo << " " << interval.hi << "\n";
  return 0;
}

struct RankArgs {
  std::string framework = "heapsort:3,10";
  std::string scorer;
  std::string interval = "all";
  std::vector<std::string> curves;
  std::size_t smooth = 3;
  std::string dumps, pools, qrels, adapter, queries, docs, output, stats, tag;
  bool projection = false;
  double noise = 0.0;
  double error_rate = 0.0;
};

int run_rank(const RankArgs& a, const Common& common) {
  const FrameworkSpec fw = parse_framework_spec(a.framework);
  const ScorerSpec sc = parse_scorer_spec(a.scorer);
  if (sc.attention() && a.dumps.empty()) throw Error("attention scorers need --dumps");
  if (sc.kind == ScorerSpec::Kind::kSynthetic && a.qrels.empty()) {
    throw Error("the synthetic scorer needs --qrels");
  }
  if (sc.adapter() && a.adapter.empty()) throw Error("adapter scorers need --adapter");
  if (sc.adapter() && a.queries.empty()) throw Error("adapter scorers need --queries");

  const Pools pools = load_pools(a.pools, a.dumps, a.docs);
  std::map<std::string, std::string> query_text;
  if (!a.queries.empty()) query_text = parse_id_text_tsv(read_text_file(a.queries));

  std::unique_ptr<DumpStore> store;
  LayerInterval interval;
  if (sc.attention()) {
    store = std::make_unique<DumpStore>(a.dumps, a.projection);
    const std::size_t layers = store->whole(pools.query_ids.front(), false).real->num_layers;
    interval = resolve_interval(parse_interval_spec(a.interval), layers, load_curves(a.curves),
                                a.smooth);
  }
  std::optional<RelevanceJudgments> qrels;
  if (!a.qrels.empty()) qrels = read_qrels_file(a.qrels);
  std::unique_ptr<AdapterProcess> process;
  if (sc.adapter()) process = std::make_unique<AdapterProcess>(a.adapter);
  const AdapterMode mode = sc.kind == ScorerSpec::Kind::kAdapterGeneration
                               ? AdapterMode::kGeneration
                               : AdapterMode::kLikelihood;

  std::vector<FrameworkResult> results(pools.query_ids.size());
  auto rank_one = [&](std::size_t i) {
    const std::string& qid = pools.query_ids[i];
    const auto& pool = pools.docs.at(qid);
    Query query{qid, {}};
    if (auto it = query_text.find(qid); it != query_text.end()) query.text = it->second;

    std::unique_ptr<ListScorer> scorer;
    std::unique_ptr<SetOracle> oracle;
    switch (sc.kind) {
      case ScorerSpec::Kind::kAttention:
      case ScorerSpec::Kind::kAttentionNoCal:
        scorer = std::make_unique<DumpAttentionScorer>(*store, interval,
                                                       sc.kind == ScorerSpec::Kind::kAttention);
        oracle = std::make_unique<ArgmaxOracle>(*scorer);
        break;
      case ScorerSpec::Kind::kSynthetic:
        scorer = std::make_unique<SyntheticScorer>(*qrels, a.noise, common.seed);
        oracle = std::make_unique<SyntheticOracle>(*qrels, a.error_rate, common.seed);
        break;
      case ScorerSpec::Kind::kAdapterLikelihood:
      case ScorerSpec::Kind::kAdapterGeneration:
        scorer = std::make_unique<AdapterScorer>(*process, mode);
        oracle = std::make_unique<AdapterOracle>(*process, mode);
        break;
    }

    switch (fw.kind) {
      case FrameworkSpec::Kind::kSingle:
        results[i] = listwise_single(query, pool, *scorer);
        break;
      case FrameworkSpec::Kind::kSliding:
        // a pool that fits in one window is ranked in one call
        results[i] = pool.size() <= fw.a ? listwise_single(query, pool, *scorer)
                                         : listwise_sliding(query, pool, *scorer, fw.a, fw.b);
        break;
      case FrameworkSpec::Kind::kHeapsort:
        results[i] = setwise_heapsort(query, pool, *oracle, fw.a, std::min(fw.b, pool.size()));
        break;
      case FrameworkSpec::Kind::kBubblesort:
        results[i] = setwise_bubblesort(query, pool, *oracle, fw.a, std::min(fw.b, pool.size()));
        break;
    }
  };
  // one adapter process answers requests in order
  parallel_for(results.size(), sc.adapter() ? 1 : common.jobs, rank_one);

  std::vector<RankedList> lists;
  ComparisonStats total;
  std::string stats_csv = "query_id,oracle_calls,forward_passes,docs_touched\n";
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    lists.push_back(r.ranked);
    total.oracle_calls += r.stats.oracle_calls;
    total.forward_passes += r.stats.forward_passes;
    total.docs_touched += r.stats.docs_touched;
    stats_csv += pools.query_ids[i] + "," + std::to_string(r.stats.oracle_calls) + "," +
                 std::to_string(r.stats.forward_passes) + "," +
                 std::to_string(r.stats.docs_touched) + "\n";
  }
  std::cerr << "rank: " << lists.size() << " queries, " << total.oracle_calls << " oracle calls, "
            << total.forward_passes << " forward passes\n";
  if (!a.stats.empty()) write_text_file(a.stats, stats_csv);
  emit(a.output, emit_run(lists, a.tag.empty() ? lists.front().method_tag : a.tag));
  return 0;
}

struct EvalArgs {
  std::string run, qrels, gain = "linear", latency, baseline, variant, output;
  std::vector<std::size_t> cutoffs{10};
  bool per_query = false;
};

int run_eval(const EvalArgs& a) {
  std::ostringstream out;
  if (!a.run.empty()) {
    if (a.qrels.empty()) throw Error("--run needs --qrels");
    std::vector<std::string> warnings;
    const auto qrels = read_qrels_file(a.qrels, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    const auto lists = read_run_file(a.run);
    const Gain gain = parse_gain(a.gain);

    std::vector<const RankedList*> judged;
    for (const auto& l : lists) {
      if (qrels.has_query(l.query_id)) {
        judged.push_back(&l);
      } else {
        std::cerr << "warning: query " << l.query_id << " has no judgments, skipped\n";
      }
    }
    if (judged.empty()) throw Error("no run query has relevance judgments");
    for (std::size_t k : a.cutoffs) {
      double sum = 0.0;
      for (const auto* l : judged) {
        const double v = ndcg_at_k(*l, qrels, k, gain);
        sum += v;
        if (a.per_query) out << l->query_id << "\tnDCG@" << k << " = " << fixed4(v) << "\n";
      }
      out << "nDCG@" << k << " = " << fixed4(sum / static_cast<double>(judged.size())) << "\n";
    }
    out << "queries = " << judged.size() << "\n";
  }
  if (!a.latency.empty()) {
    if (a.baseline.empty() || a.variant.empty()) {
      throw Error("--latency needs --baseline and --variant tags");
    }
    const auto report =
        summarize_latency(parse_latency_csv(read_text_file(a.latency)), a.baseline, a.variant);
    out << "stage,baseline_mean_s,variant_mean_s,reduction_pct\n";
    for (const auto& s : report.stages) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "%s,%.6f,%.6f,%.2f\n", to_string(s.stage).c_str(),
                    s.baseline_mean, s.variant_mean, s.reduction_pct);
      out << buf;
    }
  }
  if (a.run.empty() && a.latency.empty()) throw Error("give --run and/or --latency");
  emit(a.output, out.str());
  return 0;
}

struct SimulateArgs {
  std::string params, output, curve_out, dump_dir;
  std::vector<std::string> fixed;
};

int run_simulate(SynthConfig cfg, const SimulateArgs& a, const Common& common) {
  cfg.validate();
  std::vector<IntervalPolicy> policies{IntervalPolicy::all(), IntervalPolicy::selective(),
                                       IntervalPolicy::peak()};
  for (const auto& f : a.fixed) {
    const auto spec = parse_interval_spec(f);
    if (spec.kind != IntervalSpec::Kind::kExplicit) throw Error("--fixed takes lo,hi");
    policies.push_back(IntervalPolicy::fixed_interval(spec.interval));
  }
  const SyntheticCorpus corpus = gen_synthetic_corpus(cfg, common.jobs);
  if (!a.dump_dir.empty()) {
    fs::create_directories(a.dump_dir);
    const DumpStore store(a.dump_dir);
    parallel_for(corpus.queries.size(), common.jobs, [&](std::size_t i) {
      const auto& q = corpus.queries[i];
      write_dump_file(q.real, store.whole_path(q.real.query_id, false));
      write_dump_file(*q.null, store.whole_path(q.real.query_id, true));
    });
    std::vector<RankedList> first_stage;
    for (const auto& q : corpus.queries) {
      RankedList l{q.real.query_id, {}, "first-stage"};
      for (const auto& d : q.pool) {
        l.entries.push_back({d.id, static_cast<double>(q.pool.size() - d.initial_rank)});
      }
      first_stage.push_back(std::move(l));
    }
    write_text_file(fs::path(a.dump_dir) / "qrels.txt", format_qrels(corpus.qrels));
    write_text_file(fs::path(a.dump_dir) / "pools.run", emit_run(first_stage, "first-stage"));
    write_text_file(fs::path(a.dump_dir) / "config.json", format_synth_config(cfg));
  }
  const StudyReport report = run_study(cfg, corpus, policies, common.jobs);
  std::cerr << "simulate: measured peak at layer " << report.measured_peak << " (planted "
            << cfg.peak_layer << ")\n";
  if (!a.curve_out.empty()) write_text_file(a.curve_out, format_curve_csv(report.curve));
  emit(a.output, format_study_csv(report));
  return 0;
}

struct ExportArgs {
  std::vector<std::string> curves;
  std::string output, title, y_label = "nDCG@10";
};

int run_export(const ExportArgs& a) {
  PlotOptions opt;
  opt.title = a.title;
  opt.y_label = a.y_label;
  emit(a.output, render_curves_svg(load_curves(a.curves), opt));
  return 0;
}

struct ManifestArgs {
  std::string pools, queries, out_dir = ".", output;
  std::size_t max_words = 300;
  bool no_null = false;
};

int run_manifest(const ManifestArgs& a) {
  const Pools pools = load_pools(a.pools, "", "");
  const auto texts = parse_id_text_tsv(read_text_file(a.queries));
  const DumpStore store(a.out_dir);
  std::vector<ManifestEntry> entries;
  for (const auto& qid : pools.query_ids) {
    auto it = texts.find(qid);
    if (it == texts.end()) throw Error("no text for query " + qid);
    ManifestEntry e;
    e.query = {qid, it->second};
    for (const auto& d : pools.docs.at(qid)) e.doc_ids.push_back(d.id);
    e.max_words = a.max_words;
    e.output_path = store.whole_path(qid, false).string();
    entries.push_back(e);
    if (!a.no_null) {
      e.null_query = true;
      e.output_path = store.whole_path(qid, true).string();
      entries.push_back(e);
    }
  }
  emit(a.output, format_manifest(entries));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Attention-based document re-ranking experiments", "attnrank"};
  app.require_subcommand(1);
  app.fallthrough();
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON file with option values; flags override it");

  Common common;
  common.jobs = default_jobs();
  app.add_option("--jobs,-j", common.jobs, "Worker threads (default $ATTNRANK_JOBS or 1)")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", common.seed, "Seed for randomized scorers and the simulator");

  ScoreArgs score;
  auto* score_cmd = app.add_subcommand("score", "Score dumps with ICR and write a run file");
  score_cmd->add_option("--dumps", score.dumps, "Directory of ICRA dumps")->required();
  score_cmd->add_option("--pools", score.pools, "First-stage run file (default: dump order)");
  score_cmd->add_option("--interval", score.interval, "all | peak | selective:w | lo,hi");
  score_cmd->add_option("--curves", score.curves, "Layer curve CSVs for peak/selective");
  score_cmd->add_option("--smooth", score.smooth, "Curve smoothing window before peak finding");
  score_cmd->add_flag("--no-calibration", score.no_calibration, "Skip the null-query pass");
  score_cmd->add_option("--tag", score.tag, "Run tag (default: method tag)");
  score_cmd->add_option("-o,--output", score.output, "Run file (default stdout)");

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Per-layer nDCG curve as CSV");
  sweep_cmd->add_option("--dumps", sweep.dumps, "Directory of ICRA dumps")->required();
  sweep_cmd->add_option("--qrels", sweep.qrels, "TREC qrels")->required();
  sweep_cmd->add_option("--pools", sweep.pools, "First-stage run file (default: dump order)");
  sweep_cmd->add_option("-k", sweep.k, "nDCG cutoff")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--gain", sweep.gain, "linear | exponential");
  sweep_cmd->add_flag("--no-calibration", sweep.no_calibration, "Skip the null-query pass");
  sweep_cmd->add_option("-o,--output", sweep.output, "Curve CSV (default stdout)");

  SelectArgs select;
  auto* select_cmd =
      app.add_subcommand("select-interval", "Center-biased interval from peak layers");
  select_cmd->add_option("--peaks", select.peaks, "Peak layer indices")->delimiter(',');
  select_cmd->add_option("--curves", select.curves, "Layer curve CSVs, one per dataset");
  select_cmd->add_option("--layers,-L", select.layers, "Total layers of the model");
  select_cmd->add_option("-w,--width", select.width, "Interval width")->check(CLI::PositiveNumber);
  select_cmd->add_option("--smooth", select.smooth, "Curve smoothing window before peak finding");

  RankArgs rank;
  auto* rank_cmd = app.add_subcommand("rank", "Re-rank pools with a framework and a scorer");
  rank_cmd->add_option("--framework", rank.framework,
                       "single | sliding:ws,step | heapsort:c,k | bubblesort:c,k");
  rank_cmd
      ->add_option("--scorer", rank.scorer,
                   "attention | attention-nocal | synthetic | adapter:likelihood | "
                   "adapter:generation")
      ->required();
  rank_cmd->add_option("--interval", rank.interval, "all | peak | selective:w | lo,hi");
  rank_cmd->add_option("--curves", rank.curves, "Layer curve CSVs for peak/selective");
  rank_cmd->add_option("--smooth", rank.smooth, "Curve smoothing window before peak finding");
  rank_cmd->add_option("--dumps", rank.dumps, "Directory of ICRA dumps");
  rank_cmd->add_flag("--projection", rank.projection,
                     "Serve missing subset dumps by slicing whole-pool dumps");
  rank_cmd->add_option("--pools", rank.pools, "First-stage run file");
  rank_cmd->add_option("--qrels", rank.qrels, "TREC qrels (synthetic scorer)");
  rank_cmd->add_option("--noise", rank.noise, "Synthetic listwise score noise");
  rank_cmd->add_option("--error-rate", rank.error_rate, "Synthetic setwise error rate");
  rank_cmd->add_option("--adapter", rank.adapter, "Adapter command, run through /bin/sh");
  rank_cmd->add_option("--queries", rank.queries, "Query texts, id<TAB>text");
  rank_cmd->add_option("--docs", rank.docs, "Document texts, id<TAB>text");
  rank_cmd->add_option("--stats", rank.stats, "Per-query comparison counts CSV");
  rank_cmd->add_option("--tag", rank.tag, "Run tag (default: method tag)");
  rank_cmd->add_option("-o,--output", rank.output, "Run file (default stdout)");

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "nDCG of a run, latency reduction summary");
  eval_cmd->add_option("--run", eval.run, "TREC run file");
  eval_cmd->add_option("--qrels", eval.qrels, "TREC qrels");
  eval_cmd->add_option("-k", eval.cutoffs, "nDCG cutoffs")->delimiter(',');
  eval_cmd->add_option("--gain", eval.gain, "linear | exponential");
  eval_cmd->add_flag("--per-query", eval.per_query, "Also print each query");
  eval_cmd->add_option("--latency", eval.latency, "Latency samples CSV");
  eval_cmd->add_option("--baseline", eval.baseline, "Baseline config tag");
  eval_cmd->add_option("--variant", eval.variant, "Variant config tag");
  eval_cmd->add_option("-o,--output", eval.output, "Report (default stdout)");

  SynthConfig synth;
  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Synthetic layer study");
  sim_cmd->add_option("--params", sim.params, "Simulator parameters as JSON");
  sim_cmd->add_option("--layers", synth.num_layers, "Layers");
  sim_cmd->add_option("--docs", synth.num_docs, "Documents per query");
  sim_cmd->add_option("--queries", synth.num_queries, "Queries");
  sim_cmd->add_option("--peak", synth.peak_layer, "Planted peak layer");
  sim_cmd->add_option("--sigma", synth.signal_width, "Width of the planted bump");
  sim_cmd->add_option("--strength", synth.signal_strength, "Height of the planted bump");
  sim_cmd->add_option("--boundary-noise", synth.boundary_noise, "Boundary-layer noise");
  sim_cmd->add_option("--boundary-decay", synth.boundary_decay, "Boundary noise decay (layers)");
  sim_cmd->add_option("--jitter", synth.jitter, "Relative jitter of the signal");
  sim_cmd->add_option("--layer-noise", synth.layer_noise, "Per-layer noise floor");
  sim_cmd->add_option("--position-bias", synth.position_bias, "Query-independent rank bias");
  sim_cmd->add_option("-k", synth.k, "nDCG cutoff");
  sim_cmd->add_option("-w,--width", synth.interval_width, "Selective interval width");
  sim_cmd->add_option("--smooth", synth.smoothing_window, "Smoothing before peak finding");
  sim_cmd->add_option("--fixed", sim.fixed, "Extra fixed interval lo,hi (repeatable)")
      ->allow_extra_args(false);
  sim_cmd->add_option("--curve-out", sim.curve_out, "Write the measured curve CSV");
  sim_cmd->add_option("--dump-dir", sim.dump_dir, "Write dumps, qrels and pools here");
  sim_cmd->add_option("-o,--output", sim.output, "Study CSV (default stdout)");

  ExportArgs exp;
  auto* export_cmd = app.add_subcommand("export-curves", "Layer curves CSV to SVG chart");
  export_cmd->add_option("curves", exp.curves, "Curve CSV files")->required();
  export_cmd->add_option("--title", exp.title, "Chart title");
  export_cmd->add_option("--y-label", exp.y_label, "Y axis label");
  export_cmd->add_option("-o,--output", exp.output, "SVG file (default stdout)");

  ManifestArgs man;
  auto* manifest_cmd =
      app.add_subcommand("manifest", "JSON-lines dump jobs for the model adapter");
  manifest_cmd->add_option("--pools", man.pools, "First-stage run file")->required();
  manifest_cmd->add_option("--queries", man.queries, "Query texts, id<TAB>text")->required();
  manifest_cmd->add_option("--out-dir", man.out_dir, "Where the adapter writes dumps");
  manifest_cmd->add_option("--max-words", man.max_words, "Document truncation in words");
  manifest_cmd->add_flag("--no-null", man.no_null, "Skip the null-query jobs");
  manifest_cmd->add_option("-o,--output", man.output, "Manifest (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (*score_cmd) return run_score(score, common);
    if (*sweep_cmd) return run_sweep(sweep, common);
    if (*select_cmd) return run_select(select);
    if (*rank_cmd) return run_rank(rank, common);
    if (*eval_cmd) return run_eval(eval);
    if (*sim_cmd) {
      SynthConfig cfg = synth;
      if (!sim.params.empty()) {
        // file values first, then any flag given explicitly
        cfg = parse_synth_config(read_text_file(sim.params));
        for (const auto* opt : sim_cmd->get_options()) {
          if (opt->count() == 0) continue;
          const std::string name = opt->get_name(false, true);
          if (name == "--layers") cfg.num_layers = synth.num_layers;
          if (name == "--docs") cfg.num_docs = synth.num_docs;
          if (name == "--queries") cfg.num_queries = synth.num_queries;
          if (name == "--peak") cfg.peak_layer = synth.peak_layer;
          if (name == "--sigma") cfg.signal_width = synth.signal_width;
          if (name == "--strength") cfg.signal_strength = synth.signal_strength;
          if (name == "--boundary-noise") cfg.boundary_noise = synth.boundary_noise;
          if (name == "--boundary-decay") cfg.boundary_decay = synth.boundary_decay;
          if (name == "--jitter") cfg.jitter = synth.jitter;
          if (name == "--layer-noise") cfg.layer_noise = synth.layer_noise;
          if (name == "--position-bias") cfg.position_bias = synth.position_bias;
          if (name == "-k") cfg.k = synth.k;
          if (name == "--width") cfg.interval_width = synth.interval_width;
          if (name == "--smooth") cfg.smoothing_window = synth.smoothing_window;
        }
      }
      if (app.get_option("--seed")->count() > 0) cfg.seed = common.seed;
      return run_simulate(cfg, sim, common);
    }
    if (*export_cmd) return run_export(exp);
    if (*manifest_cmd) return run_manifest(man);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
