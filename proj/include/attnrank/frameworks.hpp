#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "attnrank/core.hpp"

namespace attnrank {

/// Picks the most relevant document of a small candidate set.
/// Implementations must be deterministic for fixed inputs.
class SetOracle {
 public:
  virtual ~SetOracle() = default;
  virtual std::size_t select(const Query& query, std::span<const Document> set) = 0;
  /// Model forward passes consumed by one select() call.
  virtual unsigned forward_passes_per_call() const = 0;
  virtual std::string name() const = 0;
};

/// Scores an ordered list of documents presented together in one prompt.
/// The returned map must cover exactly the given documents.
class ListScorer {
 public:
  virtual ~ListScorer() = default;
  virtual ScoreMap score(const Query& query, std::span<const Document> docs) = 0;
  virtual unsigned forward_passes_per_call() const = 0;
  virtual std::string name() const = 0;
};

struct ComparisonStats {
  std::size_t oracle_calls = 0;
  std::size_t forward_passes = 0;
  std::size_t docs_touched = 0;  // documents presented, summed over calls
  std::optional<double> wall_time;  // seconds
};

struct FrameworkResult {
  RankedList ranked;
  ComparisonStats stats;
};

/// One scorer call over the whole pool.
FrameworkResult listwise_single(const Query& query, const std::vector<Document>& pool,
                                ListScorer& scorer);

/// Single bottom-up pass of overlapping windows of size `window`, moving
/// toward the head by `step`. The topmost window is clamped to start at 0.
/// Requires 1 <= step < window <= pool size.
FrameworkResult listwise_sliding(const Query& query, const std::vector<Document>& pool,
                                 ListScorer& scorer, std::size_t window, std::size_t step);

/// Number of scorer calls listwise_sliding makes.
std::size_t sliding_window_calls(std::size_t pool_size, std::size_t window, std::size_t step);

/// Top-k by heapsort over a (c-1)-ary max-heap; each sift-down step shows
/// the oracle one parent and its children. With c = 2 the heap is binary
/// and a step takes two pairwise calls. Documents past k keep first-stage
/// order.
FrameworkResult setwise_heapsort(const Query& query, const std::vector<Document>& pool,
                                 SetOracle& oracle, std::size_t c, std::size_t k);

/// Top-k by k bubble passes; each pass slides a window of up to c
/// documents from the tail to position i and promotes the winner.
FrameworkResult setwise_bubblesort(const Query& query, const std::vector<Document>& pool,
                                   SetOracle& oracle, std::size_t c, std::size_t k);

/// Upper bound on heapsort oracle calls: s * (N + k * ceil(log2 N)), s = 2
/// for c = 2 and 1 otherwise.
std::size_t heapsort_call_bound(std::size_t n, std::size_t c, std::size_t k);

/// k * ceil((N-1)/(c-1)).
std::size_t bubblesort_call_bound(std::size_t n, std::size_t c, std::size_t k);

// ---------------------------------------------------------------------------
// Scorer and oracle implementations

/// Wraps a plain function as a ListScorer.
class FunctionScorer final : public ListScorer {
 public:
  using Fn = std::function<ScoreMap(const Query&, std::span<const Document>)>;
  FunctionScorer(Fn fn, unsigned passes, std::string name);
  ScoreMap score(const Query& query, std::span<const Document> docs) override;
  unsigned forward_passes_per_call() const override { return passes_; }
  std::string name() const override { return name_; }

 private:
  Fn fn_;
  unsigned passes_;
  std::string name_;
};

/// Turns a ListScorer into a SetOracle by taking the argmax of its scores.
/// Ties go to the lowest initial_rank.
class ArgmaxOracle final : public SetOracle {
 public:
  explicit ArgmaxOracle(ListScorer& scorer) : scorer_(scorer) {}
  std::size_t select(const Query& query, std::span<const Document> set) override;
  unsigned forward_passes_per_call() const override {
    return scorer_.forward_passes_per_call();
  }
  std::string name() const override { return scorer_.name(); }

 private:
  ListScorer& scorer_;
};

/// Ground-truth oracle from qrels: picks the highest grade (ties to lowest
/// initial_rank). With error_rate > 0 a pseudo-random other member is
/// returned instead, decided by a hash of (seed, query, set), so repeated
/// calls agree.
class SyntheticOracle final : public SetOracle {
 public:
  SyntheticOracle(const RelevanceJudgments& qrels, double error_rate = 0.0,
                  std::uint64_t seed = 0);
  std::size_t select(const Query& query, std::span<const Document> set) override;
  unsigned forward_passes_per_call() const override { return 1; }
  std::string name() const override { return "synthetic"; }

 private:
  const RelevanceJudgments& qrels_;
  double error_rate_;
  std::uint64_t seed_;
};

/// Ground-truth list scorer: grade plus deterministic Gaussian noise keyed
/// by (seed, query, doc).
class SyntheticScorer final : public ListScorer {
 public:
  SyntheticScorer(const RelevanceJudgments& qrels, double noise = 0.0, std::uint64_t seed = 0);
  ScoreMap score(const Query& query, std::span<const Document> docs) override;
  unsigned forward_passes_per_call() const override { return 1; }
  std::string name() const override { return "synthetic"; }

 private:
  const RelevanceJudgments& qrels_;
  double noise_;
  std::uint64_t seed_;
};

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view data, std::uint64_t h = 0xcbf29ce484222325ULL);

}  // namespace attnrank
