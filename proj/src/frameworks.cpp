#include "attnrank/frameworks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

namespace attnrank {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

ScoreMap checked_scores(ListScorer& scorer, const Query& query,
                        std::span<const Document> docs) {
  ScoreMap scores = scorer.score(query, docs);
  bool ok = scores.size() == docs.size();
  for (std::size_t i = 0; ok && i < docs.size(); ++i) {
    auto it = scores.find(docs[i].id);
    ok = it != scores.end() && std::isfinite(it->second);
  }
  if (!ok) {
    throw Error("scorer '" + scorer.name() + "' returned wrong doc set for query " + query.id);
  }
  return scores;
}

std::size_t checked_select(SetOracle& oracle, const Query& query,
                           std::span<const Document> set, ComparisonStats& stats) {
  const std::size_t winner = oracle.select(query, set);
  ++stats.oracle_calls;
  stats.forward_passes += oracle.forward_passes_per_call();
  stats.docs_touched += set.size();
  if (winner >= set.size()) {
    throw Error("oracle index out of bounds: " + std::to_string(winner) + " for a set of " +
                std::to_string(set.size()));
  }
  return winner;
}

void check_setwise_args(std::size_t n, std::size_t c, std::size_t k) {
  if (c < 2) throw Error("setwise set size c must be at least 2");
  if (k < 1 || k > n) {
    throw Error("setwise cutoff k must be in [1, " + std::to_string(n) + "], got " +
                std::to_string(k));
  }
}

// Positional scores so the emitted list stays sorted descending.
RankedList positional_list(const Query& query, const std::vector<Document>& pool,
                           const std::vector<std::size_t>& order, std::string tag) {
  RankedList out{query.id, {}, std::move(tag)};
  out.entries.reserve(order.size());
  const double n = static_cast<double>(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    out.entries.push_back({pool[order[i]].id, n - static_cast<double>(i)});
  }
  return out;
}

// Appends the docs not in `top` in first-stage order.
void append_rest(std::vector<std::size_t>& top, const std::vector<Document>& pool) {
  std::vector<bool> used(pool.size(), false);
  for (std::size_t i : top) used[i] = true;
  std::vector<std::size_t> rest;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (!used[i]) rest.push_back(i);
  }
  std::stable_sort(rest.begin(), rest.end(), [&](std::size_t a, std::size_t b) {
    return pool[a].initial_rank < pool[b].initial_rank;
  });
  top.insert(top.end(), rest.begin(), rest.end());
}

std::size_t ceil_log2(std::size_t n) {
  std::size_t bits = 0;
  while ((std::size_t{1} << bits) < n) ++bits;
  return bits;
}

std::uint64_t mix(std::uint64_t h, std::string_view s) {
  h = fnv1a(s, h);
  return fnv1a(std::string_view("\n", 1), h);
}

double unit_from(std::uint64_t h) {
  return static_cast<double>(h >> 11) * (1.0 / 9007199254740992.0);
}

}  // namespace

std::uint64_t fnv1a(std::string_view data, std::uint64_t h) {
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

FrameworkResult listwise_single(const Query& query, const std::vector<Document>& pool,
                                ListScorer& scorer) {
  if (pool.empty()) throw Error("listwise ranking needs a non-empty pool");
  const auto start = Clock::now();
  FrameworkResult result;
  const ScoreMap scores = checked_scores(scorer, query, pool);
  result.stats.oracle_calls = 1;
  result.stats.forward_passes = scorer.forward_passes_per_call();
  result.stats.docs_touched = pool.size();
  result.ranked = stable_rank(query.id, scores, pool, "listwise-single/" + scorer.name());
  result.stats.wall_time = seconds_since(start);
  return result;
}

std::size_t sliding_window_calls(std::size_t pool_size, std::size_t window, std::size_t step) {
  if (step == 0 || window > pool_size) return 0;
  return (pool_size - window + step - 1) / step + 1;
}

FrameworkResult listwise_sliding(const Query& query, const std::vector<Document>& pool,
                                 ListScorer& scorer, std::size_t window, std::size_t step) {
  const std::size_t n = pool.size();
  if (step < 1 || step >= window || window > n) {
    throw Error("sliding window needs 1 <= step < window <= N; got step " +
                std::to_string(step) + ", window " + std::to_string(window) + ", N " +
                std::to_string(n));
  }
  if (window == n) {
    FrameworkResult single = listwise_single(query, pool, scorer);
    single.ranked.method_tag = "listwise-sliding/" + scorer.name();
    return single;
  }

  const auto t0 = Clock::now();
  FrameworkResult result;
  std::vector<Document> current = pool;
  std::size_t start = n - window;
  while (true) {
    std::span<Document> win(current.data() + start, window);
    const ScoreMap scores = checked_scores(scorer, query, win);
    ++result.stats.oracle_calls;
    result.stats.forward_passes += scorer.forward_passes_per_call();
    result.stats.docs_touched += window;
    // stable: equal scores keep their current relative order
    std::stable_sort(win.begin(), win.end(), [&](const Document& a, const Document& b) {
      return scores.at(a.id) > scores.at(b.id);
    });
    if (start == 0) break;
    start = start > step ? start - step : 0;
  }

  std::vector<std::size_t> order(n);
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i) index[pool[i].id] = i;
  for (std::size_t i = 0; i < n; ++i) order[i] = index.at(current[i].id);
  result.ranked = positional_list(query, pool, order, "listwise-sliding/" + scorer.name());
  result.stats.wall_time = seconds_since(t0);
  return result;
}

std::size_t heapsort_call_bound(std::size_t n, std::size_t c, std::size_t k) {
  const std::size_t per_step = c == 2 ? 2 : 1;
  return per_step * (n + k * ceil_log2(n));
}

std::size_t bubblesort_call_bound(std::size_t n, std::size_t c, std::size_t k) {
  if (n < 2) return 0;
  return k * ((n - 1 + c - 2) / (c - 1));
}

FrameworkResult setwise_heapsort(const Query& query, const std::vector<Document>& pool,
                                 SetOracle& oracle, std::size_t c, std::size_t k) {
  const std::size_t n = pool.size();
  check_setwise_args(n, c, k);
  const auto t0 = Clock::now();
  FrameworkResult result;
  auto& stats = result.stats;

  const std::size_t arity = std::max<std::size_t>(2, c - 1);
  std::vector<std::size_t> heap(n);  // heap slot -> pool index
  std::iota(heap.begin(), heap.end(), std::size_t{0});
  std::vector<Document> set;
  set.reserve(c);

  // Most relevant among the given heap slots, in sets of at most c.
  auto best_of = [&](const std::vector<std::size_t>& slots) {
    std::size_t champion = slots.front();
    std::size_t next = 1;
    while (next < slots.size()) {
      std::vector<std::size_t> group{champion};
      while (group.size() < c && next < slots.size()) group.push_back(slots[next++]);
      set.clear();
      for (std::size_t s : group) set.push_back(pool[heap[s]]);
      champion = group[checked_select(oracle, query, set, stats)];
    }
    return champion;
  };

  auto sift_down = [&](std::size_t slot, std::size_t size) {
    std::vector<std::size_t> slots;
    while (true) {
      const std::size_t first_child = arity * slot + 1;
      if (first_child >= size) return;
      slots.assign({slot});
      for (std::size_t ch = first_child; ch < std::min(size, first_child + arity); ++ch) {
        slots.push_back(ch);
      }
      const std::size_t best = best_of(slots);
      if (best == slot) return;
      std::swap(heap[slot], heap[best]);
      slot = best;
    }
  };

  if (n > 1) {
    for (std::size_t i = (n - 2) / arity + 1; i-- > 0;) sift_down(i, n);
  }

  std::vector<std::size_t> order;
  order.reserve(n);
  std::size_t size = n;
  for (std::size_t extracted = 0; extracted < k; ++extracted) {
    order.push_back(heap[0]);
    heap[0] = heap[size - 1];
    --size;
    if (extracted + 1 < k) sift_down(0, size);
  }
  append_rest(order, pool);

  result.ranked = positional_list(query, pool, order,
                                  "setwise-heapsort-c" + std::to_string(c) + "/" + oracle.name());
  stats.wall_time = seconds_since(t0);
  return result;
}

FrameworkResult setwise_bubblesort(const Query& query, const std::vector<Document>& pool,
                                   SetOracle& oracle, std::size_t c, std::size_t k) {
  const std::size_t n = pool.size();
  check_setwise_args(n, c, k);
  const auto t0 = Clock::now();
  FrameworkResult result;

  std::vector<std::size_t> pos(n);
  std::iota(pos.begin(), pos.end(), std::size_t{0});
  std::vector<Document> set;
  set.reserve(c);

  for (std::size_t i = 0; i < k; ++i) {
    if (n - i < 2) break;
    std::size_t start = n - i >= c ? n - c : i;
    while (true) {
      const std::size_t end = std::min(n, start + c);
      set.clear();
      for (std::size_t p = start; p < end; ++p) set.push_back(pool[pos[p]]);
      const std::size_t winner = checked_select(oracle, query, set, result.stats);
      std::swap(pos[start], pos[start + winner]);
      if (start == i) break;
      start = start - i > c - 1 ? start - (c - 1) : i;
    }
  }

  std::vector<std::size_t> order(pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(k));
  append_rest(order, pool);
  result.ranked = positional_list(
      query, pool, order, "setwise-bubblesort-c" + std::to_string(c) + "/" + oracle.name());
  result.stats.wall_time = seconds_since(t0);
  return result;
}

FunctionScorer::FunctionScorer(Fn fn, unsigned passes, std::string name)
    : fn_(std::move(fn)), passes_(passes), name_(std::move(name)) {}

ScoreMap FunctionScorer::score(const Query& query, std::span<const Document> docs) {
  return fn_(query, docs);
}

std::size_t ArgmaxOracle::select(const Query& query, std::span<const Document> set) {
  const ScoreMap scores = checked_scores(scorer_, query, set);
  std::size_t best = 0;
  for (std::size_t i = 1; i < set.size(); ++i) {
    const double a = scores.at(set[i].id);
    const double b = scores.at(set[best].id);
    if (a > b || (a == b && set[i].initial_rank < set[best].initial_rank)) best = i;
  }
  return best;
}

SyntheticOracle::SyntheticOracle(const RelevanceJudgments& qrels, double error_rate,
                                 std::uint64_t seed)
    : qrels_(qrels), error_rate_(error_rate), seed_(seed) {
  if (error_rate < 0.0 || error_rate > 1.0) throw Error("error rate must be in [0, 1]");
}

std::size_t SyntheticOracle::select(const Query& query, std::span<const Document> set) {
  if (set.empty()) throw Error("oracle called with an empty set");
  std::size_t best = 0;
  for (std::size_t i = 1; i < set.size(); ++i) {
    const int g = qrels_.grade(query.id, set[i].id);
    const int gb = qrels_.grade(query.id, set[best].id);
    if (g > gb || (g == gb && set[i].initial_rank < set[best].initial_rank)) best = i;
  }
  if (error_rate_ <= 0.0 || set.size() < 2) return best;

  std::uint64_t h = fnv1a(std::string_view(reinterpret_cast<const char*>(&seed_), sizeof seed_));
  h = mix(h, query.id);
  for (const auto& d : set) h = mix(h, d.id);
  if (unit_from(h) >= error_rate_) return best;
  const std::size_t other = fnv1a("alt", h) % (set.size() - 1);
  return other < best ? other : other + 1;
}

SyntheticScorer::SyntheticScorer(const RelevanceJudgments& qrels, double noise,
                                 std::uint64_t seed)
    : qrels_(qrels), noise_(noise), seed_(seed) {}

ScoreMap SyntheticScorer::score(const Query& query, std::span<const Document> docs) {
  ScoreMap out;
  out.reserve(docs.size());
  for (const auto& d : docs) {
    double s = qrels_.grade(query.id, d.id);
    if (noise_ > 0.0) {
      std::uint64_t h =
          fnv1a(std::string_view(reinterpret_cast<const char*>(&seed_), sizeof seed_));
      h = mix(mix(h, query.id), d.id);
      std::mt19937_64 rng(h);
      s += noise_ * std::normal_distribution<double>(0.0, 1.0)(rng);
    }
    out[d.id] = s;
  }
  return out;
}

}  // namespace attnrank
