#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "attnrank/core.hpp"
#include "attnrank/dump.hpp"
#include "attnrank/frameworks.hpp"

namespace attnrank {

/// Hex FNV-1a of the ordered doc ids, each followed by '\n'. Names the dump
/// files for a document subset presented in that order.
std::string subset_hash(const std::vector<std::string>& doc_ids);

/// Directory of ICRA dumps.
///
///   <qid>.icra, <qid>.null.icra                  whole candidate pool
///   <qid>.<subset_hash>.icra, ...null.icra       one prompt over a subset
///
/// A subset request is served from its own files when present, from the
/// whole-pool files when the subset is the whole pool, and otherwise (only
/// if projection is enabled) by slicing the subset's columns out of the
/// whole-pool dump. Projection ignores how attention would redistribute in
/// a shorter prompt, so it is an approximation for desk runs.
class DumpStore {
 public:
  explicit DumpStore(std::filesystem::path dir, bool allow_projection = false);

  struct Pair {
    std::shared_ptr<const AttentionDump> real;
    std::shared_ptr<const AttentionDump> null;  // may be null when not requested
  };

  /// Whole-pool dumps for a query.
  Pair whole(const std::string& query_id, bool with_null);

  /// Dumps covering `doc_ids` (in presentation order), restricted to them.
  Pair subset(const std::string& query_id, const std::vector<std::string>& doc_ids,
              bool with_null);

  std::filesystem::path whole_path(const std::string& query_id, bool null) const;
  std::filesystem::path subset_path(const std::string& query_id,
                                    const std::vector<std::string>& doc_ids, bool null) const;

 private:
  std::shared_ptr<const AttentionDump> load(const std::filesystem::path& path);

  std::filesystem::path dir_;
  bool allow_projection_;
  std::mutex mutex_;
  std::map<std::filesystem::path, std::shared_ptr<const AttentionDump>> cache_;
};

/// ICR scores read from a DumpStore. Calibrated scoring costs two forward
/// passes per call, uncalibrated one.
class DumpAttentionScorer final : public ListScorer {
 public:
  DumpAttentionScorer(DumpStore& store, LayerInterval interval, bool calibrated);
  ScoreMap score(const Query& query, std::span<const Document> docs) override;
  unsigned forward_passes_per_call() const override { return calibrated_ ? 2 : 1; }
  std::string name() const override;

 private:
  DumpStore& store_;
  LayerInterval interval_;
  bool calibrated_;
};

}  // namespace attnrank
