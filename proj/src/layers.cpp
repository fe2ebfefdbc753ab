#include "attnrank/layers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "attnrank/icr.hpp"
#include "attnrank/io.hpp"
#include "attnrank/parallel.hpp"

namespace attnrank {

namespace {

// Curve values closer than this count as tied for peak finding.
constexpr double kTieEpsilon = 1e-12;

}  // namespace

void PeakReport::add(const std::string& dataset_id, std::size_t layer) {
  per_dataset_peaks[dataset_id] = layer;
  peak_set.clear();
  for (const auto& [_, l] : per_dataset_peaks) peak_set.insert(l);
}

LayerCurve per_layer_metrics(const std::vector<QueryDumps>& queries,
                             const RelevanceJudgments& qrels, std::size_t k, Gain gain,
                             std::size_t jobs) {
  if (queries.empty()) throw Error("per-layer sweep needs at least one query");
  const std::size_t layers = queries.front().real.num_layers;
  for (const auto& q : queries) {
    if (q.real.num_layers != layers) {
      throw Error("inconsistent layer counts: query " + q.real.query_id + " has " +
                  std::to_string(q.real.num_layers) + ", expected " + std::to_string(layers));
    }
  }

  LayerCurve curve;
  curve.model_name = queries.front().real.model_name;
  // per-query rows, summed in query order so the result is thread-count free
  std::vector<std::vector<double>> rows(queries.size());
  parallel_for(queries.size(), jobs, [&](std::size_t i) {
    const auto& q = queries[i];
    const bool calibrated = q.null.has_value();
    const CalibratedMatrix m = calibrated ? calibrate(q.real, *q.null) : uncalibrated(q.real);
    rows[i].resize(layers);
    for (std::size_t l = 0; l < layers; ++l) {
      const LayerInterval single{l, l};
      const RankedList ranked =
          rank_matrix(q.real.query_id, m, single, q.pool, icr_tag(single, calibrated));
      rows[i][l] = ndcg_at_k(ranked, qrels, k, gain);
    }
  });
  curve.per_layer_metric.assign(layers, 0.0);
  for (const auto& row : rows) {
    for (std::size_t l = 0; l < layers; ++l) curve.per_layer_metric[l] += row[l];
  }
  for (double& v : curve.per_layer_metric) v /= static_cast<double>(queries.size());
  return curve;
}

LayerCurve smooth_curve(const LayerCurve& curve, std::size_t window) {
  if (window == 0 || window % 2 == 0) {
    throw Error("smoothing window must be odd and positive, got " + std::to_string(window));
  }
  const std::size_t n = curve.num_layers();
  if (window > n) {
    throw Error("smoothing window " + std::to_string(window) + " exceeds curve length " +
                std::to_string(n));
  }
  const std::size_t half = window / 2;
  LayerCurve out = curve;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(n - 1, i + half);
    double sum = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) sum += curve.per_layer_metric[j];
    out.per_layer_metric[i] = sum / static_cast<double>(hi - lo + 1);
  }
  return out;
}

std::size_t find_peak(const LayerCurve& curve) {
  const auto& v = curve.per_layer_metric;
  if (v.empty()) throw Error("cannot find the peak of an empty curve");
  const double center = (static_cast<double>(v.size()) - 1.0) / 2.0;
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best] + kTieEpsilon) {
      best = i;
    } else if (std::abs(v[i] - v[best]) <= kTieEpsilon &&
               std::abs(static_cast<double>(i) - center) <
                   std::abs(static_cast<double>(best) - center)) {
      best = i;  // equal distance keeps the lower index
    }
  }
  return best;
}

std::string IntervalTrace::describe() const {
  std::ostringstream os;
  os << "peak set span [" << peak_lo << "," << peak_hi << "], midpoint " << peak_mid
     << ", geometric center " << center << "\n";
  if (anchored_at_upper) {
    os << "peaks sit at or past the center: highest peak " << peak_hi
       << " anchors the upper bound, window extends toward earlier layers\n";
  } else {
    os << "peaks sit before the center: lowest peak " << peak_lo
       << " anchors the lower bound, window extends toward later layers\n";
  }
  os << "interval " << to_string(interval) << " (width " << interval.width() << ")\n";
  return os.str();
}

LayerInterval select_interval(const PeakReport& peaks, std::size_t w, IntervalTrace* trace) {
  if (peaks.peak_set.empty()) throw Error("no peaks to anchor the interval");
  if (w == 0) throw Error("window size must be positive");
  const std::size_t total = peaks.total_layers;
  const std::size_t lo = *peaks.peak_set.begin();
  const std::size_t hi = *peaks.peak_set.rbegin();
  if (hi >= total) {
    throw Error("peak layer " + std::to_string(hi) + " out of range for " +
                std::to_string(total) + " layers");
  }
  if (w < hi - lo + 1) throw Error("window cannot cover observed peaks");

  const double center = (static_cast<double>(total) - 1.0) / 2.0;
  const double mid = (static_cast<double>(lo) + static_cast<double>(hi)) / 2.0;
  const bool upper = mid >= center;

  LayerInterval interval;
  if (upper) {
    interval = {hi + 1 >= w ? hi + 1 - w : 0, hi};
  } else {
    interval = {lo, std::min(total - 1, lo + w - 1)};
  }

  if (trace != nullptr) *trace = {lo, hi, center, mid, upper, interval};
  return interval;
}

std::string format_curve_csv(const LayerCurve& curve) {
  std::ostringstream os;
  os.precision(17);
  os << "layer_index,metric\n";
  for (std::size_t l = 0; l < curve.num_layers(); ++l) {
    os << l << "," << curve.per_layer_metric[l] << "\n";
  }
  return os.str();
}

LayerCurve parse_curve_csv(const std::string& text, std::string dataset_id,
                           std::string model_name) {
  LayerCurve curve{std::move(dataset_id), std::move(model_name), {}};
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line.rfind("layer_index", 0) == 0) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw FormatError("curve line " + std::to_string(line_no) + ": expected 2 columns");
    }
    std::size_t layer = 0;
    double metric = 0.0;
    try {
      layer = std::stoul(line.substr(0, comma));
      metric = std::stod(line.substr(comma + 1));
    } catch (const std::exception&) {
      throw FormatError("curve line " + std::to_string(line_no) + ": not a number");
    }
    if (layer != curve.per_layer_metric.size()) {
      throw FormatError("curve line " + std::to_string(line_no) + ": layer " +
                        std::to_string(layer) + " out of sequence");
    }
    curve.per_layer_metric.push_back(metric);
  }
  if (curve.per_layer_metric.empty()) throw FormatError("curve has no layers");
  return curve;
}

LayerCurve read_curve_file(const std::string& path) {
  const std::string text = read_text_file(path);
  auto stem = path;
  if (auto slash = stem.find_last_of('/'); slash != std::string::npos) stem = stem.substr(slash + 1);
  if (auto dot = stem.rfind('.'); dot != std::string::npos) stem = stem.substr(0, dot);
  return parse_curve_csv(text, stem);
}

}  // namespace attnrank
