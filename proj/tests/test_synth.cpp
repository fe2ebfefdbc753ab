#include <gtest/gtest.h>

#include "attnrank/icr.hpp"
#include "attnrank/synth.hpp"

namespace attnrank {
namespace {

SynthConfig small_config() {
  SynthConfig cfg;
  cfg.num_layers = 12;
  cfg.peak_layer = 7;
  cfg.num_docs = 20;
  cfg.num_queries = 8;
  return cfg;
}

TEST(Synth, DeterministicPerIndex) {
  const auto cfg = small_config();
  const auto a = gen_synthetic_query(cfg, 3);
  const auto b = gen_synthetic_query(cfg, 3);
  EXPECT_EQ(a.real, b.real);
  EXPECT_EQ(a.null, b.null);
  EXPECT_NE(gen_synthetic_query(cfg, 4).real.matrix, a.real.matrix);

  auto other = cfg;
  other.seed = 8;
  EXPECT_NE(gen_synthetic_query(other, 3).real.matrix, a.real.matrix);
}

TEST(Synth, CorpusIndependentOfThreadCount) {
  const auto cfg = small_config();
  const auto one = gen_synthetic_corpus(cfg, 1);
  const auto many = gen_synthetic_corpus(cfg, 4);
  ASSERT_EQ(one.queries.size(), cfg.num_queries);
  for (std::size_t i = 0; i < one.queries.size(); ++i) {
    EXPECT_EQ(one.queries[i].real, many.queries[i].real);
  }
  EXPECT_EQ(one.qrels.size(), many.qrels.size());
}

TEST(Synth, DumpsAreValidPairs) {
  const auto cfg = small_config();
  for (std::size_t i = 0; i < cfg.num_queries; ++i) {
    const auto q = gen_synthetic_query(cfg, i);
    EXPECT_NO_THROW(validate_dump(q.real));
    EXPECT_NO_THROW(validate_dump(q.null));
    EXPECT_NO_THROW(validate_pair(q.real, q.null));
    EXPECT_EQ(q.real.query_id, synthetic_query_id(i));
    bool relevant = false;
    for (const auto& [_, g] : q.qrels.judged(q.real.query_id)) relevant |= g > 0;
    EXPECT_TRUE(relevant);
  }
}

TEST(Synth, NoSignalKeepsFirstStageOrder) {
  auto cfg = small_config();
  cfg.signal_strength = 0.0;
  cfg.boundary_noise = 0.0;
  cfg.layer_noise = 0.0;
  const auto q = gen_synthetic_query(cfg, 0);
  const auto ranked = score_icr(q.real, q.null, {0, cfg.num_layers - 1}, q.pool);
  std::vector<std::string> initial;
  for (const auto& d : q.pool) initial.push_back(d.id);
  EXPECT_EQ(ranked.doc_ids(), initial);
}

TEST(Synth, ConfigJsonRoundTrip) {
  auto cfg = small_config();
  cfg.jitter = 0.25;
  cfg.seed = 123456789012345ULL;
  const auto back = parse_synth_config(format_synth_config(cfg));
  EXPECT_EQ(format_synth_config(back), format_synth_config(cfg));
  EXPECT_EQ(parse_synth_config("{\"peak_layer\": 3}").peak_layer, 3u);
  EXPECT_THROW(parse_synth_config("{\"peak_layer\": 40}"), Error);
  EXPECT_THROW(parse_synth_config("{\"jitter\": \"high\"}"), Error);
  EXPECT_THROW(parse_synth_config("[1]"), Error);
}

TEST(Synth, InfeasibleMassRejected) {
  SynthConfig cfg;
  cfg.head_count = 1;
  cfg.query_token_count = 1;
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(Study, PolicyIntervalsAndCost) {
  auto cfg = small_config();
  cfg.signal_width = 1.0;
  cfg.num_queries = 30;
  const auto report =
      run_study(cfg, {IntervalPolicy::all(), IntervalPolicy::selective(), IntervalPolicy::peak(),
                      IntervalPolicy::fixed_interval({2, 4})});
  ASSERT_EQ(report.rows.size(), 4u);
  EXPECT_EQ(report.rows[0].interval, (LayerInterval{0, 11}));
  EXPECT_EQ(report.rows[0].cost_reduction_pct, 0.0);
  EXPECT_EQ(report.rows[1].interval.width(), cfg.interval_width);
  EXPECT_TRUE(report.rows[1].interval.contains(report.measured_peak));
  EXPECT_EQ(report.rows[2].interval.width(), 1u);
  EXPECT_EQ(report.rows[3].policy, "fixed[2,4]");
  EXPECT_EQ(report.rows[3].executed_layers, 5u);
  EXPECT_EQ(report.curve.num_layers(), 12u);

  const auto csv = format_study_csv(report);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "policy,lo,hi,width,mean_ndcg,executed_layers,cost_reduction_pct");
}

TEST(Study, LayerCostReduction) {
  EXPECT_EQ(executed_layers({15, 18}), 19u);
  EXPECT_DOUBLE_EQ(layer_cost_reduction_pct({15, 18}, 32), 40.625);
  EXPECT_DOUBLE_EQ(layer_cost_reduction_pct({0, 31}, 32), 0.0);
  EXPECT_THROW(layer_cost_reduction_pct({0, 32}, 32), Error);
}

}  // namespace
}  // namespace attnrank
