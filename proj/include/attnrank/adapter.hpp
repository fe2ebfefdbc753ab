#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "attnrank/core.hpp"
#include "attnrank/frameworks.hpp"

namespace attnrank {

/// How a model adapter answers a setwise or listwise request.
enum class AdapterMode { kLikelihood, kGeneration };

std::string to_string(AdapterMode mode);
AdapterMode parse_adapter_mode(const std::string& text);

/// A long-running adapter process spoken to in JSON lines over its stdin and
/// stdout. One request line in, one response line out:
///
///   {"op":"setwise","mode":"likelihood","query_id":..,"query":..,
///    "doc_ids":[..],"docs":[..]}
///     -> {"winner":i,"distribution":[..]}
///   {"op":"listwise", same fields}
///     -> {"scores":[..]}             (parallel to doc_ids)
///
/// Any response may instead be {"error":"..."}.
class AdapterProcess {
 public:
  /// Runs `command` through /bin/sh.
  explicit AdapterProcess(const std::string& command);
  ~AdapterProcess();
  AdapterProcess(const AdapterProcess&) = delete;
  AdapterProcess& operator=(const AdapterProcess&) = delete;

  /// Sends one JSON line and returns the response line. Throws when the
  /// process has exited.
  std::string request(const std::string& line);

 private:
  int pid_ = -1;
  std::FILE* to_child_ = nullptr;
  std::FILE* from_child_ = nullptr;
};

/// SetOracle answered by an adapter process.
class AdapterOracle final : public SetOracle {
 public:
  AdapterOracle(AdapterProcess& process, AdapterMode mode);
  std::size_t select(const Query& query, std::span<const Document> set) override;
  unsigned forward_passes_per_call() const override { return 1; }
  std::string name() const override { return "adapter-" + to_string(mode_); }

  /// Label distribution returned with the last likelihood answer, if any.
  const std::vector<double>& last_distribution() const { return last_distribution_; }

 private:
  AdapterProcess& process_;
  AdapterMode mode_;
  std::vector<double> last_distribution_;
};

/// ListScorer answered by an adapter process.
class AdapterScorer final : public ListScorer {
 public:
  AdapterScorer(AdapterProcess& process, AdapterMode mode);
  ScoreMap score(const Query& query, std::span<const Document> docs) override;
  unsigned forward_passes_per_call() const override { return 1; }
  std::string name() const override { return "adapter-" + to_string(mode_); }

 private:
  AdapterProcess& process_;
  AdapterMode mode_;
};

/// One dump-extraction job for a batch adapter run.
struct ManifestEntry {
  Query query;
  std::vector<std::string> doc_ids;  // first-stage order
  bool null_query = false;           // content-free calibration pass
  std::size_t max_words = 300;
  std::string output_path;
};

/// JSON lines: {"query_id","query","doc_ids","mode":"icr","null","max_words","out"}.
std::string format_manifest(const std::vector<ManifestEntry>& entries);

}  // namespace attnrank
