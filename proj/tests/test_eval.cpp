#include <gtest/gtest.h>

#include <random>

#include "attnrank/eval.hpp"
#include "support/test_util.hpp"

namespace attnrank {
namespace {

RankedList list_of(const std::string& q, const std::vector<std::string>& ids) {
  RankedList r{q, {}, "t"};
  for (std::size_t i = 0; i < ids.size(); ++i) {
    r.entries.push_back({ids[i], static_cast<double>(ids.size() - i)});
  }
  return r;
}

TEST(ParseQrels, SingleLine) {
  const auto qrels = parse_qrels("q1 0 d1 2\n");
  EXPECT_EQ(qrels.grade("q1", "d1"), 2);
  EXPECT_EQ(qrels.size(), 1u);
}

TEST(ParseQrels, EmptyInput) { EXPECT_TRUE(parse_qrels("").empty()); }

TEST(ParseQrels, ArityError) {
  try {
    parse_qrels("q1 d1 2\n");
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("line 1"), std::string::npos);
  }
}

TEST(ParseQrels, NonIntegerGrade) {
  try {
    parse_qrels("q1 0 d1 2\nq1 0 d2 high\n");
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(ParseQrels, DuplicateKeepsLastAndWarns) {
  std::vector<std::string> warnings;
  const auto qrels = parse_qrels("q1 0 d1 1\r\nq1 0 d1 3\n\n", &warnings);
  EXPECT_EQ(qrels.grade("q1", "d1"), 3);
  ASSERT_EQ(warnings.size(), 1u);
}

TEST(Ndcg, PerfectOrdering) {
  const auto qrels = parse_qrels("q 0 a 3\nq 0 b 2\nq 0 c 1\n");
  EXPECT_DOUBLE_EQ(ndcg_at_k(list_of("q", {"a", "b", "c"}), qrels, 3), 1.0);
}

TEST(Ndcg, WorkedExample) {
  const auto qrels = parse_qrels("q 0 a 3\nq 0 b 2\nq 0 z 0\n");
  // ranked grades 0, 3, 2
  EXPECT_NEAR(ndcg_at_k(list_of("q", {"z", "a", "b"}), qrels, 3), 0.6787622294601761, 1e-12);
}

TEST(Ndcg, NoRelevantDocs) {
  const auto qrels = parse_qrels("q 0 a 0\n");
  EXPECT_EQ(ndcg_at_k(list_of("q", {"a"}), qrels, 10), 0.0);
  EXPECT_EQ(ndcg_at_k(list_of("other", {"a"}), qrels, 10), 0.0);
}

TEST(Ndcg, IdcgUsesUnretrievedJudgedDocs) {
  const auto qrels = parse_qrels("q 0 a 1\nq 0 missing 1\n");
  // DCG = 1, IDCG = 1 + 1/log2(3)
  EXPECT_NEAR(ndcg_at_k(list_of("q", {"a"}), qrels, 10), 1.0 / (1.0 + 1.0 / std::log2(3.0)),
              1e-12);
}

TEST(Ndcg, ExponentialGain) {
  const auto qrels = parse_qrels("q 0 a 3\nq 0 b 1\n");
  // DCG = 1 + 7/log2(3), IDCG = 7 + 1/log2(3)
  const double expected = (1.0 + 7.0 / std::log2(3.0)) / (7.0 + 1.0 / std::log2(3.0));
  EXPECT_NEAR(ndcg_at_k(list_of("q", {"b", "a"}), qrels, 10, Gain::kExponential), expected,
              1e-12);
}

TEST(Ndcg, MatchesReferenceAndIsOrderOnly) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng() % 30;
    const auto ids = testing::doc_names(n);
    RelevanceJudgments qrels;
    std::map<std::string, int> grades;
    for (const auto& id : ids) {
      if (rng() % 3 == 0) continue;  // unjudged
      const int g = static_cast<int>(rng() % 4);
      qrels.set("q", id, g);
      grades[id] = g;
    }
    auto ranking = ids;
    std::shuffle(ranking.begin(), ranking.end(), rng);
    const std::size_t k = 1 + rng() % 10;
    const double got = ndcg_at_k("q", ranking, qrels, k);
    ASSERT_NEAR(got, testing::reference_ndcg(ranking, grades, k), 1e-9);
    ASSERT_GE(got, 0.0);
    ASSERT_LE(got, 1.0 + 1e-12);

    // scores do not matter, only order
    auto list = list_of("q", ranking);
    for (auto& e : list.entries) e.score = std::exp(e.score) * 3.0 - 100.0;
    ASSERT_EQ(ndcg_at_k(list, qrels, k), got);
  }
}

TEST(EmitRun, SixColumns) {
  const auto text = emit_run({list_of("q1", {"b", "a"})}, "mytag");
  EXPECT_EQ(text, "q1 Q0 b 1 2 mytag\nq1 Q0 a 2 1 mytag\n");
}

TEST(EmitRun, TiesFollowListOrder) {
  RankedList r{"q", {{"x", 2.0}, {"y", 2.0}}, ""};
  EXPECT_EQ(emit_run({r}, "t"), "q Q0 x 1 2 t\nq Q0 y 2 2 t\n");
}

TEST(EmitRun, RejectsDuplicatesAndEmpty) {
  RankedList r{"q", {{"x", 2.0}, {"x", 1.0}}, ""};
  EXPECT_THROW(emit_run({r}, "t"), Error);
  EXPECT_THROW(emit_run({}, "t"), Error);
}

TEST(EmitRun, ParseReproducesLists) {
  std::mt19937_64 rng(4);
  std::vector<RankedList> lists;
  for (int q = 0; q < 5; ++q) {
    RankedList r{"q" + std::to_string(q), {}, "tag"};
    double score = 10.0;
    for (const auto& id : testing::doc_names(1 + rng() % 20)) {
      score -= std::uniform_real_distribution<double>(0.0, 1.0)(rng) * (rng() % 2);
      r.entries.push_back({id, score});
    }
    lists.push_back(r);
  }
  EXPECT_EQ(parse_run(emit_run(lists, "tag")), lists);
}

TEST(ParseRun, OrdersByRankColumn) {
  const auto lists = parse_run("q Q0 b 2 1.0 t\nq Q0 a 1 2.0 t\n");
  ASSERT_EQ(lists.size(), 1u);
  EXPECT_EQ(lists[0].doc_ids(), (std::vector<std::string>{"a", "b"}));
  EXPECT_THROW(parse_run("q Q0 a 1 2.0\n"), FormatError);
  EXPECT_THROW(parse_run("q Q0 a x 2.0 t\n"), FormatError);
}

TEST(Latency, ReductionPercent) {
  std::vector<LatencySample> s{
      {"q1", LatencyStage::kTotalScoring, 2.0, "all"},
      {"q2", LatencyStage::kTotalScoring, 2.0, "all"},
      {"q1", LatencyStage::kTotalScoring, 1.0, "sel"},
  };
  auto report = summarize_latency(s, "all", "sel");
  ASSERT_EQ(report.stages.size(), 1u);
  EXPECT_DOUBLE_EQ(report.stages[0].reduction_pct, 50.0);

  s = {{"q", LatencyStage::kForwardPass, 3.0, "a"}, {"q", LatencyStage::kForwardPass, 3.0, "b"}};
  EXPECT_DOUBLE_EQ(summarize_latency(s, "a", "b").stages[0].reduction_pct, 0.0);

  s = {{"q", LatencyStage::kForwardPass, 10.0, "a"}, {"q", LatencyStage::kForwardPass, 6.9, "b"}};
  EXPECT_NEAR(summarize_latency(s, "a", "b").stages[0].reduction_pct, 31.0, 1e-9);
}

TEST(Latency, MissingTag) {
  std::vector<LatencySample> s{{"q", LatencyStage::kForwardPass, 1.0, "a"}};
  EXPECT_THROW(summarize_latency(s, "a", "b"), Error);
  EXPECT_THROW(summarize_latency(s, "x", "a"), Error);
}

TEST(Latency, CsvRoundTrip) {
  std::vector<LatencySample> s{{"q1", LatencyStage::kForwardPass, 0.125, "all"},
                               {"q2", LatencyStage::kTotalScoring, 1.5, "sel"}};
  const auto back = parse_latency_csv(format_latency_csv(s));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].stage, LatencyStage::kTotalScoring);
  EXPECT_EQ(back[0].seconds, 0.125);
  EXPECT_EQ(back[1].config_tag, "sel");
  EXPECT_THROW(parse_latency_csv("q,forward_pass,0,a\n"), FormatError);
}

}  // namespace
}  // namespace attnrank
