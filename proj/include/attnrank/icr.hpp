#pragma once

#include <optional>
#include <string>
#include <vector>

#include "attnrank/core.hpp"
#include "attnrank/dump.hpp"

namespace attnrank {

/// Per-(layer, doc) attention mass after subtracting the content-free pass.
/// Values may be negative. Layer-major like AttentionDump.
struct CalibratedMatrix {
  std::size_t num_layers = 0;
  std::vector<std::string> doc_ids;
  std::vector<double> values;

  std::size_t num_docs() const { return doc_ids.size(); }
  double value(std::size_t layer, std::size_t doc) const {
    return values[layer * num_docs() + doc];
  }
};

/// Final per-document relevance scores, parallel to `doc_ids`.
struct ScoreVector {
  std::vector<std::string> doc_ids;
  std::vector<double> scores;

  ScoreMap to_map() const;
};

CalibratedMatrix calibrate(const AttentionDump& real, const AttentionDump& null);

/// The raw matrix of a single pass, for the uncalibrated ablation.
CalibratedMatrix uncalibrated(const AttentionDump& real);

ScoreVector aggregate_layers(const CalibratedMatrix& matrix, const LayerInterval& interval);

/// Short description of an ICR configuration, e.g. "icr[15,18]" or
/// "icr-nocal[0,31]".
std::string icr_tag(const LayerInterval& interval, bool calibrated);

/// Scores `pool` from a real dump and an optional content-free dump, summing
/// layers in `interval`, and ranks with the stable tie-break.
RankedList score_icr(const AttentionDump& real, const std::optional<AttentionDump>& null,
                     const LayerInterval& interval, const std::vector<Document>& pool);

/// Same as score_icr for an already-calibrated matrix.
RankedList rank_matrix(const std::string& query_id, const CalibratedMatrix& matrix,
                       const LayerInterval& interval, const std::vector<Document>& pool,
                       std::string method_tag);

}  // namespace attnrank
