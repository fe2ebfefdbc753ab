#include <gtest/gtest.h>

#include <random>

#include "attnrank/layers.hpp"
#include "attnrank/synth.hpp"
#include "support/test_util.hpp"

namespace attnrank {
namespace {

using testing::make_dump;

PeakReport peaks_of(std::set<std::size_t> layers, std::size_t total) {
  PeakReport r;
  r.total_layers = total;
  std::size_t i = 0;
  for (auto l : layers) r.add("ds" + std::to_string(i++), l);
  return r;
}

LayerCurve curve_of(std::vector<double> v) { return {"ds", "m", std::move(v)}; }

TEST(PerLayerMetrics, TwoLayerExample) {
  // layer 0 puts the relevant doc first, layer 1 second
  QueryDumps q{make_dump("q", {"d0", "d1"}, {{0.9f, 0.1f}, {0.1f, 0.9f}}), std::nullopt,
               make_pool({"d0", "d1"})};
  RelevanceJudgments qrels;
  qrels.set("q", "d0", 1);
  const auto curve = per_layer_metrics({q}, qrels, 10);
  ASSERT_EQ(curve.num_layers(), 2u);
  EXPECT_NEAR(curve.per_layer_metric[0], 1.0, 1e-12);
  EXPECT_NEAR(curve.per_layer_metric[1], 0.6309297535714575, 1e-12);
}

TEST(PerLayerMetrics, ZeroMatricesGiveFlatCurve) {
  std::vector<QueryDumps> qs;
  RelevanceJudgments qrels;
  for (int i = 0; i < 3; ++i) {
    const std::string qid = "q" + std::to_string(i);
    auto real = make_dump(qid, {"a", "b", "c"}, std::vector<std::vector<float>>(6, {0, 0, 0}));
    auto null = real;
    null.calibration = true;
    qs.push_back({real, null, make_pool({"a", "b", "c"})});
    qrels.set(qid, i == 0 ? "a" : "c", 2);
  }
  const auto curve = per_layer_metrics(qs, qrels, 10);
  for (double v : curve.per_layer_metric) EXPECT_EQ(v, curve.per_layer_metric[0]);
  EXPECT_EQ(find_peak(curve), 2u);  // floor((6-1)/2) after central tie-break
}

TEST(PerLayerMetrics, InconsistentLayerCounts) {
  QueryDumps a{make_dump("a", {"x"}, {{0.1f}}), std::nullopt, make_pool({"x"})};
  QueryDumps b{make_dump("b", {"x"}, {{0.1f}, {0.1f}}), std::nullopt, make_pool({"x"})};
  EXPECT_THROW(per_layer_metrics({a, b}, {}, 10), Error);
}

TEST(PerLayerMetrics, PlantedPeakIsMaximal) {
  SynthConfig cfg;
  cfg.num_layers = 16;
  cfg.peak_layer = 10;
  cfg.signal_width = 0.5;
  cfg.num_queries = 40;
  cfg.num_docs = 30;
  cfg.jitter = 0.0;
  cfg.boundary_noise = 0.0;
  const auto corpus = gen_synthetic_corpus(cfg);
  const auto curve = per_layer_metrics(corpus.queries, corpus.qrels, 10);
  EXPECT_EQ(find_peak(curve), 10u);
}

TEST(SmoothCurve, Window3) {
  const auto s = smooth_curve(curve_of({0, 1, 2, 3}), 3);
  EXPECT_EQ(s.per_layer_metric, (std::vector<double>{0.5, 1.0, 2.0, 2.5}));
  EXPECT_EQ(smooth_curve(curve_of({4, 7}), 1).per_layer_metric, (std::vector<double>{4, 7}));
  EXPECT_THROW(smooth_curve(curve_of({0, 1, 2, 3}), 2), Error);
  EXPECT_THROW(smooth_curve(curve_of({0, 1}), 3), Error);
}

TEST(FindPeak, Examples) {
  EXPECT_EQ(find_peak(curve_of({0.1, 0.5, 0.3})), 1u);
  EXPECT_EQ(find_peak(curve_of({0.5, 0.5, 0.1, 0.1})), 1u);
  EXPECT_EQ(find_peak(curve_of(std::vector<double>(32, 0.4))), 15u);
  EXPECT_EQ(find_peak(curve_of({0.2, 0.1, 0.1, 0.2})), 0u);
}

TEST(SelectInterval, ReferenceRows) {
  EXPECT_EQ(select_interval(peaks_of({18}, 32), 4), (LayerInterval{15, 18}));
  EXPECT_EQ(select_interval(peaks_of({16}, 32), 4), (LayerInterval{13, 16}));
  EXPECT_EQ(select_interval(peaks_of({10}, 28), 4), (LayerInterval{10, 13}));
  EXPECT_EQ(select_interval(peaks_of({18, 21}, 36), 4), (LayerInterval{18, 21}));
}

TEST(SelectInterval, EdgesAndErrors) {
  EXPECT_EQ(select_interval(peaks_of({0}, 32), 4), (LayerInterval{0, 3}));
  EXPECT_EQ(select_interval(peaks_of({31}, 32), 4), (LayerInterval{28, 31}));
  EXPECT_EQ(select_interval(peaks_of({2}, 32), 40), (LayerInterval{2, 31}));
  try {
    select_interval(peaks_of({10, 20}, 32), 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "window cannot cover observed peaks");
  }
  EXPECT_THROW(select_interval(peaks_of({40}, 32), 4), Error);
  EXPECT_THROW(select_interval(PeakReport{}, 4), Error);
}

TEST(SelectInterval, TraceDescribesAnchor) {
  IntervalTrace trace;
  select_interval(peaks_of({18}, 32), 4, &trace);
  EXPECT_TRUE(trace.anchored_at_upper);
  EXPECT_EQ(trace.center, 15.5);
  EXPECT_NE(trace.describe().find("[15,18]"), std::string::npos);
}

TEST(SelectInterval, Properties) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t total = 4 + rng() % 60;
    std::set<std::size_t> layers;
    const std::size_t count = 1 + rng() % 3;
    const std::size_t base = rng() % total;
    const std::size_t spread = 1 + rng() % 6;
    for (std::size_t i = 0; i < count; ++i) layers.insert(std::min(total - 1, base + rng() % spread));
    const auto peaks = peaks_of(layers, total);
    const std::size_t lo = *layers.begin();
    const std::size_t hi = *layers.rbegin();
    const std::size_t span = hi - lo + 1;
    const std::size_t w = span + rng() % 8;

    const auto interval = select_interval(peaks, w);
    ASSERT_LE(interval.hi, total - 1);
    ASSERT_LE(interval.width(), w);
    if (interval.lo > 0 && interval.hi < total - 1) ASSERT_EQ(interval.width(), w);
    for (auto p : layers) ASSERT_TRUE(interval.contains(p));

    // central bias, restricted to windows not much wider than the distance
    // from the peaks to the center
    const double c = (static_cast<double>(total) - 1.0) / 2.0;
    const double m = (static_cast<double>(lo) + static_cast<double>(hi)) / 2.0;
    const double mid = (static_cast<double>(interval.lo) + static_cast<double>(interval.hi)) / 2.0;
    if (static_cast<double>(w) <= 4.0 * std::abs(m - c) + static_cast<double>(span) + 1.0) {
      ASSERT_LE(std::abs(mid - c), std::abs(m - c) + 0.5)
          << "L=" << total << " w=" << w << " lo=" << lo << " hi=" << hi;
    }

    // widening keeps coverage of the narrower interval
    const auto wider = select_interval(peaks, w + 1);
    ASSERT_LE(wider.lo, interval.lo);
    ASSERT_GE(wider.hi, interval.hi);

    if (count == 1 || span == 1) {
      ASSERT_EQ(select_interval(peaks_of({lo}, total), 1), (LayerInterval{lo, lo}));
    }
  }
}

TEST(CurveCsv, RoundTrip) {
  const auto curve = curve_of({0.1, 1.0 / 3.0, 0.25});
  const auto text = format_curve_csv(curve);
  EXPECT_EQ(text.substr(0, 19), "layer_index,metric\n");
  EXPECT_EQ(parse_curve_csv(text, "ds", "m").per_layer_metric, curve.per_layer_metric);
  EXPECT_THROW(parse_curve_csv("layer_index,metric\n1,0.5\n"), FormatError);
  EXPECT_THROW(parse_curve_csv("layer_index,metric\n"), FormatError);
}

}  // namespace
}  // namespace attnrank
