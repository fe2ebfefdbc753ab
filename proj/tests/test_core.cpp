#include <gtest/gtest.h>

#include <random>

#include "attnrank/core.hpp"
#include "support/test_util.hpp"

namespace attnrank {
namespace {

TEST(StableRank, DistinctScoresSortDescending) {
  const auto pool = make_pool({"a", "b", "c"});
  const auto ranked = stable_rank("q", {{"a", 2.0}, {"b", 3.0}, {"c", 1.0}}, pool);
  EXPECT_EQ(ranked.doc_ids(), (std::vector<std::string>{"b", "a", "c"}));
  EXPECT_EQ(ranked.query_id, "q");
}

TEST(StableRank, FullTieKeepsInitialOrder) {
  const auto pool = make_pool({"a", "b", "c"});
  const auto ranked = stable_rank("q", {{"a", 0.0}, {"b", 0.0}, {"c", 0.0}}, pool);
  EXPECT_EQ(ranked.doc_ids(), (std::vector<std::string>{"a", "b", "c"}));
}

TEST(StableRank, PartialTieUsesInitialRank) {
  // initial order b, a, c
  const auto pool = make_pool({"b", "a", "c"});
  const auto ranked = stable_rank("q", {{"a", 1.0}, {"b", 1.0}, {"c", 2.0}}, pool);
  EXPECT_EQ(ranked.doc_ids(), (std::vector<std::string>{"c", "b", "a"}));
}

TEST(StableRank, MissingScoreNamesTheDocument) {
  const auto pool = make_pool({"a", "b"});
  try {
    stable_rank("q", {{"a", 1.0}}, pool);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("b"), std::string::npos);
  }
}

TEST(StableRank, RejectsNonFiniteScores) {
  const auto pool = make_pool({"a"});
  EXPECT_THROW(stable_rank("q", {{"a", std::nan("")}}, pool), Error);
  EXPECT_THROW(stable_rank("q", {{"a", INFINITY}}, pool), Error);
}

TEST(StableRank, PropertiesOverRandomPools) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = rng() % 1001;
    auto pool = make_pool(testing::doc_names(n));
    ScoreMap scores;
    for (const auto& d : pool) scores[d.id] = static_cast<double>(rng() % 7);  // many ties

    const auto first = stable_rank("q", scores, pool);
    ASSERT_EQ(first.entries.size(), n);
    for (std::size_t i = 1; i < n; ++i) {
      ASSERT_GE(first.entries[i - 1].score, first.entries[i].score);
    }

    // deterministic
    EXPECT_EQ(stable_rank("q", scores, pool), first);

    // idempotent: re-rank the ranked pool, keeping original initial ranks
    std::vector<Document> reordered;
    for (const auto& e : first.entries) {
      const auto idx = std::stoul(e.doc_id.substr(1));
      reordered.push_back(pool[idx]);
    }
    EXPECT_EQ(stable_rank("q", scores, reordered), first);
  }
}

TEST(LayerInterval, CheckBounds) {
  EXPECT_NO_THROW(check_interval({0, 31}, 32));
  EXPECT_THROW(check_interval({0, 32}, 32), Error);
  EXPECT_THROW(check_interval({5, 4}, 32), Error);
  EXPECT_EQ((LayerInterval{15, 18}.width()), 4u);
}

TEST(RelevanceJudgments, UnjudgedIsZero) {
  RelevanceJudgments qrels;
  qrels.set("q1", "d1", 2);
  EXPECT_EQ(qrels.grade("q1", "d1"), 2);
  EXPECT_EQ(qrels.grade("q1", "d2"), 0);
  EXPECT_EQ(qrels.grade("q9", "d1"), 0);
  EXPECT_THROW(qrels.set("q1", "d3", -1), Error);
}

}  // namespace
}  // namespace attnrank
