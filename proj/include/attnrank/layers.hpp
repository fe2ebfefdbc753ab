#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "attnrank/core.hpp"
#include "attnrank/dump.hpp"
#include "attnrank/eval.hpp"

namespace attnrank {

/// A metric value for every layer of one model on one dataset.
struct LayerCurve {
  std::string dataset_id;
  std::string model_name;
  std::vector<double> per_layer_metric;

  std::size_t num_layers() const { return per_layer_metric.size(); }
};

/// Peak layers observed across datasets for one model.
struct PeakReport {
  std::set<std::size_t> peak_set;
  std::size_t total_layers = 0;
  std::map<std::string, std::size_t> per_dataset_peaks;

  void add(const std::string& dataset_id, std::size_t layer);
};

/// Everything needed to score one query from dumps.
struct QueryDumps {
  AttentionDump real;
  std::optional<AttentionDump> null;
  std::vector<Document> pool;
};

/// Mean nDCG@k over queries when each layer is scored on its own. Queries
/// are spread over up to `jobs` threads; the result does not depend on it.
LayerCurve per_layer_metrics(const std::vector<QueryDumps>& queries,
                             const RelevanceJudgments& qrels, std::size_t k,
                             Gain gain = Gain::kLinear, std::size_t jobs = 1);

/// Centered moving average; windows are truncated at the curve ends.
LayerCurve smooth_curve(const LayerCurve& curve, std::size_t window);

/// Index of the maximum. Ties go to the layer nearest (L-1)/2, then to the
/// lower index.
std::size_t find_peak(const LayerCurve& curve);

/// Why select_interval chose what it chose, for printing.
struct IntervalTrace {
  std::size_t peak_lo = 0;
  std::size_t peak_hi = 0;
  double center = 0.0;
  double peak_mid = 0.0;
  bool anchored_at_upper = false;
  LayerInterval interval;

  std::string describe() const;
};

/// Center-biased interval selection: the window of `w` layers covers every
/// peak and extends from the peak set toward the model's geometric center.
/// When the peak-set midpoint sits at or past the center the highest peak
/// is the upper bound; otherwise the lowest peak is the lower bound.
LayerInterval select_interval(const PeakReport& peaks, std::size_t w,
                              IntervalTrace* trace = nullptr);

/// CSV with header "layer_index,metric".
std::string format_curve_csv(const LayerCurve& curve);
LayerCurve parse_curve_csv(const std::string& text, std::string dataset_id = {},
                           std::string model_name = {});
LayerCurve read_curve_file(const std::string& path);

}  // namespace attnrank
