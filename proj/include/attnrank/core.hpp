#pragma once

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace attnrank {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an ICRA file or other on-disk format is malformed.
class FormatError : public Error {
 public:
  using Error::Error;
};

struct Document {
  std::string id;
  std::string text;
  std::size_t initial_rank = 0;  // position in the first-stage candidate list
};

struct Query {
  std::string id;
  std::string text;
};

struct RankedEntry {
  std::string doc_id;
  double score = 0.0;

  bool operator==(const RankedEntry&) const = default;
};

/// Ordered ranking for one query. Entries are sorted by score descending.
struct RankedList {
  std::string query_id;
  std::vector<RankedEntry> entries;
  std::string method_tag;

  std::vector<std::string> doc_ids() const;
  bool operator==(const RankedList&) const = default;
};

/// Inclusive, 0-based layer range.
struct LayerInterval {
  std::size_t lo = 0;
  std::size_t hi = 0;

  std::size_t width() const { return hi - lo + 1; }
  bool contains(std::size_t layer) const { return layer >= lo && layer <= hi; }
  bool operator==(const LayerInterval&) const = default;
};

std::string to_string(const LayerInterval& interval);

/// Throws if the interval is inverted or reaches past `total_layers`.
void check_interval(const LayerInterval& interval, std::size_t total_layers);

/// Graded relevance judgments. Unjudged (query, doc) pairs have grade 0.
class RelevanceJudgments {
 public:
  using DocGrades = std::map<std::string, int>;

  void set(const std::string& query_id, const std::string& doc_id, int grade);
  int grade(const std::string& query_id, const std::string& doc_id) const;
  bool contains(const std::string& query_id, const std::string& doc_id) const;

  /// All judged documents for a query; empty if the query is unknown.
  const DocGrades& judged(const std::string& query_id) const;
  bool has_query(const std::string& query_id) const;
  std::vector<std::string> query_ids() const;
  std::size_t size() const;
  bool empty() const { return grades_.empty(); }

 private:
  std::map<std::string, DocGrades> grades_;
};

using ScoreMap = std::unordered_map<std::string, double>;

/// Sorts `pool` by score descending, ties by ascending initial_rank.
/// Every pool document must have a finite score.
RankedList stable_rank(const std::string& query_id, const ScoreMap& scores,
                       const std::vector<Document>& pool,
                       std::string method_tag = {});

/// Builds a pool whose initial ranks follow the given order.
std::vector<Document> make_pool(const std::vector<std::string>& doc_ids);

}  // namespace attnrank
