#include "attnrank/run_config.hpp"

#include <charconv>

namespace attnrank {

namespace {

std::size_t to_size(std::string_view text, const std::string& what) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw Error("invalid " + what + ": '" + std::string(text) + "'");
  }
  return v;
}

// "a,b" -> {a, b}
std::pair<std::size_t, std::size_t> size_pair(std::string_view text, const std::string& what) {
  const auto comma = text.find(',');
  if (comma == std::string_view::npos) throw Error("invalid " + what + ": expected two numbers");
  return {to_size(text.substr(0, comma), what), to_size(text.substr(comma + 1), what)};
}

}  // namespace

IntervalSpec parse_interval_spec(const std::string& text) {
  IntervalSpec s;
  if (text == "all") return s;
  if (text == "peak") {
    s.kind = IntervalSpec::Kind::kPeak;
    return s;
  }
  if (text.rfind("selective:", 0) == 0) {
    s.kind = IntervalSpec::Kind::kSelective;
    s.width = to_size(std::string_view(text).substr(10), "interval width");
    if (s.width == 0) throw Error("interval width must be positive");
    return s;
  }
  std::string_view body = text;
  if (body.size() >= 2 && body.front() == '[' && body.back() == ']') {
    body = body.substr(1, body.size() - 2);
  }
  const auto [lo, hi] = size_pair(body, "interval '" + text + "'");
  if (lo > hi) throw Error("interval " + text + " has lo > hi");
  s.kind = IntervalSpec::Kind::kExplicit;
  s.interval = {lo, hi};
  return s;
}

LayerInterval resolve_interval(const IntervalSpec& spec, std::size_t total_layers,
                               const std::vector<LayerCurve>& curves, std::size_t smoothing) {
  if (total_layers == 0) throw Error("model has no layers");
  LayerInterval out;
  switch (spec.kind) {
    case IntervalSpec::Kind::kAll:
      out = {0, total_layers - 1};
      break;
    case IntervalSpec::Kind::kExplicit:
      out = spec.interval;
      break;
    case IntervalSpec::Kind::kPeak:
    case IntervalSpec::Kind::kSelective: {
      if (curves.empty()) throw Error("peak and selective intervals need layer curves");
      if (spec.kind == IntervalSpec::Kind::kPeak && curves.size() != 1) {
        throw Error("peak interval needs exactly one curve, got " + std::to_string(curves.size()));
      }
      PeakReport peaks;
      peaks.total_layers = total_layers;
      for (std::size_t i = 0; i < curves.size(); ++i) {
        const auto& c = curves[i];
        if (c.num_layers() != total_layers) {
          throw Error("curve " + c.dataset_id + " has " + std::to_string(c.num_layers()) +
                      " layers, model has " + std::to_string(total_layers));
        }
        const std::string id = c.dataset_id.empty() ? std::to_string(i) : c.dataset_id;
        peaks.add(id, find_peak(smoothing > 1 ? smooth_curve(c, smoothing) : c));
      }
      if (spec.kind == IntervalSpec::Kind::kPeak) {
        const std::size_t p = *peaks.peak_set.begin();
        out = {p, p};
      } else {
        out = select_interval(peaks, spec.width);
      }
      break;
    }
  }
  check_interval(out, total_layers);
  return out;
}

FrameworkSpec parse_framework_spec(const std::string& text) {
  FrameworkSpec s;
  if (text == "single") return s;
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  if (colon == std::string::npos) throw Error("framework '" + text + "' needs parameters");
  const auto [a, b] = size_pair(std::string_view(text).substr(colon + 1), "framework '" + text + "'");
  s.a = a;
  s.b = b;
  if (name == "sliding") {
    s.kind = FrameworkSpec::Kind::kSliding;
    if (b == 0 || b >= a) throw Error("sliding window needs 0 < step < window");
  } else if (name == "heapsort" || name == "bubblesort") {
    s.kind = name == "heapsort" ? FrameworkSpec::Kind::kHeapsort : FrameworkSpec::Kind::kBubblesort;
    if (a < 2) throw Error("setwise set size c must be at least 2");
    if (b < 1) throw Error("setwise cutoff k must be positive");
  } else {
    throw Error("unknown framework '" + name + "'");
  }
  return s;
}

ScorerSpec parse_scorer_spec(const std::string& text) {
  ScorerSpec s;
  if (text == "attention") {
    s.kind = ScorerSpec::Kind::kAttention;
  } else if (text == "attention-nocal") {
    s.kind = ScorerSpec::Kind::kAttentionNoCal;
  } else if (text == "synthetic") {
    s.kind = ScorerSpec::Kind::kSynthetic;
  } else if (text == "adapter:likelihood") {
    s.kind = ScorerSpec::Kind::kAdapterLikelihood;
  } else if (text == "adapter:generation") {
    s.kind = ScorerSpec::Kind::kAdapterGeneration;
  } else {
    throw Error("unknown scorer '" + text + "'");
  }
  return s;
}

}  // namespace attnrank
