#include "attnrank/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace attnrank {

std::vector<std::string> RankedList::doc_ids() const {
  std::vector<std::string> ids;
  ids.reserve(entries.size());
  for (const auto& e : entries) ids.push_back(e.doc_id);
  return ids;
}

std::string to_string(const LayerInterval& interval) {
  return "[" + std::to_string(interval.lo) + "," + std::to_string(interval.hi) + "]";
}

void check_interval(const LayerInterval& interval, std::size_t total_layers) {
  if (interval.lo > interval.hi) {
    throw Error("inverted layer interval " + to_string(interval));
  }
  if (interval.hi >= total_layers) {
    throw Error("layer interval " + to_string(interval) + " out of bounds for " +
                std::to_string(total_layers) + " layers");
  }
}

void RelevanceJudgments::set(const std::string& query_id, const std::string& doc_id,
                             int grade) {
  if (grade < 0) {
    throw Error("negative relevance grade for (" + query_id + ", " + doc_id + ")");
  }
  grades_[query_id][doc_id] = grade;
}

int RelevanceJudgments::grade(const std::string& query_id,
                              const std::string& doc_id) const {
  auto q = grades_.find(query_id);
  if (q == grades_.end()) return 0;
  auto d = q->second.find(doc_id);
  return d == q->second.end() ? 0 : d->second;
}

bool RelevanceJudgments::contains(const std::string& query_id,
                                  const std::string& doc_id) const {
  auto q = grades_.find(query_id);
  return q != grades_.end() && q->second.count(doc_id) > 0;
}

const RelevanceJudgments::DocGrades& RelevanceJudgments::judged(
    const std::string& query_id) const {
  static const DocGrades kEmpty;
  auto q = grades_.find(query_id);
  return q == grades_.end() ? kEmpty : q->second;
}

bool RelevanceJudgments::has_query(const std::string& query_id) const {
  return grades_.count(query_id) > 0;
}

std::vector<std::string> RelevanceJudgments::query_ids() const {
  std::vector<std::string> ids;
  ids.reserve(grades_.size());
  for (const auto& [q, _] : grades_) ids.push_back(q);
  return ids;
}

std::size_t RelevanceJudgments::size() const {
  std::size_t n = 0;
  for (const auto& [_, docs] : grades_) n += docs.size();
  return n;
}

RankedList stable_rank(const std::string& query_id, const ScoreMap& scores,
                       const std::vector<Document>& pool, std::string method_tag) {
  std::vector<double> pool_scores(pool.size());
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const auto& doc = pool[i];
    if (!seen.insert(doc.id).second) {
      throw Error("duplicate doc_id in pool: " + doc.id);
    }
    auto it = scores.find(doc.id);
    if (it == scores.end()) {
      throw Error("missing score for doc_id " + doc.id);
    }
    if (!std::isfinite(it->second)) {
      throw Error("non-finite score for doc_id " + doc.id);
    }
    pool_scores[i] = it->second;
  }

  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (pool_scores[a] != pool_scores[b]) return pool_scores[a] > pool_scores[b];
    if (pool[a].initial_rank != pool[b].initial_rank) {
      return pool[a].initial_rank < pool[b].initial_rank;
    }
    return pool[a].id < pool[b].id;
  });

  RankedList out;
  out.query_id = query_id;
  out.method_tag = std::move(method_tag);
  out.entries.reserve(pool.size());
  for (std::size_t i : order) out.entries.push_back({pool[i].id, pool_scores[i]});
  return out;
}

std::vector<Document> make_pool(const std::vector<std::string>& doc_ids) {
  std::vector<Document> pool;
  pool.reserve(doc_ids.size());
  for (std::size_t i = 0; i < doc_ids.size(); ++i) pool.push_back({doc_ids[i], {}, i});
  return pool;
}

}  // namespace attnrank
