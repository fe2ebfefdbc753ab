#include "attnrank/icr.hpp"

#include <algorithm>
#include <set>

namespace attnrank {

namespace {

void check_pool_matches(const std::vector<std::string>& dump_ids,
                        const std::vector<Document>& pool) {
  std::set<std::string> in_dump(dump_ids.begin(), dump_ids.end());
  std::set<std::string> in_pool;
  for (const auto& d : pool) in_pool.insert(d.id);
  if (in_dump == in_pool && in_pool.size() == pool.size()) return;

  std::vector<std::string> diff;
  std::set_symmetric_difference(in_dump.begin(), in_dump.end(), in_pool.begin(),
                                in_pool.end(), std::back_inserter(diff));
  std::string msg = "pool and dump documents differ:";
  for (const auto& id : diff) msg += " " + id;
  if (diff.empty()) msg += " (duplicate ids in pool)";
  throw Error(msg);
}

}  // namespace

ScoreMap ScoreVector::to_map() const {
  ScoreMap m;
  m.reserve(doc_ids.size());
  for (std::size_t i = 0; i < doc_ids.size(); ++i) m[doc_ids[i]] = scores[i];
  return m;
}

CalibratedMatrix calibrate(const AttentionDump& real, const AttentionDump& null) {
  validate_pair(real, null);
  CalibratedMatrix out;
  out.num_layers = real.num_layers;
  out.doc_ids = real.doc_ids;
  out.values.resize(real.matrix.size());
  for (std::size_t i = 0; i < real.matrix.size(); ++i) {
    out.values[i] = static_cast<double>(real.matrix[i]) - static_cast<double>(null.matrix[i]);
  }
  return out;
}

CalibratedMatrix uncalibrated(const AttentionDump& real) {
  CalibratedMatrix out;
  out.num_layers = real.num_layers;
  out.doc_ids = real.doc_ids;
  out.values.assign(real.matrix.begin(), real.matrix.end());
  return out;
}

ScoreVector aggregate_layers(const CalibratedMatrix& matrix, const LayerInterval& interval) {
  check_interval(interval, matrix.num_layers);
  ScoreVector out;
  out.doc_ids = matrix.doc_ids;
  out.scores.assign(matrix.num_docs(), 0.0);
  for (std::size_t l = interval.lo; l <= interval.hi; ++l) {
    for (std::size_t d = 0; d < matrix.num_docs(); ++d) out.scores[d] += matrix.value(l, d);
  }
  return out;
}

std::string icr_tag(const LayerInterval& interval, bool calibrated) {
  return (calibrated ? "icr" : "icr-nocal") + to_string(interval);
}

RankedList rank_matrix(const std::string& query_id, const CalibratedMatrix& matrix,
                       const LayerInterval& interval, const std::vector<Document>& pool,
                       std::string method_tag) {
  check_pool_matches(matrix.doc_ids, pool);
  return stable_rank(query_id, aggregate_layers(matrix, interval).to_map(), pool,
                     std::move(method_tag));
}

RankedList score_icr(const AttentionDump& real, const std::optional<AttentionDump>& null,
                     const LayerInterval& interval, const std::vector<Document>& pool) {
  const bool calibrated = null.has_value();
  const CalibratedMatrix matrix = calibrated ? calibrate(real, *null) : uncalibrated(real);
  return rank_matrix(real.query_id, matrix, interval, pool, icr_tag(interval, calibrated));
}

}  // namespace attnrank
