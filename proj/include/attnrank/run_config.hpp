#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "attnrank/core.hpp"
#include "attnrank/layers.hpp"

namespace attnrank {

/// "all", "peak", "selective:w", "lo,hi" or "[lo,hi]".
struct IntervalSpec {
  enum class Kind { kAll, kPeak, kSelective, kExplicit };
  Kind kind = Kind::kAll;
  std::size_t width = 0;     // selective
  LayerInterval interval;    // explicit

  bool needs_curves() const { return kind == Kind::kPeak || kind == Kind::kSelective; }
};

IntervalSpec parse_interval_spec(const std::string& text);

/// Resolves the interval choice for a model with `total_layers` layers. Peak and
/// selective read the peaks of `curves`, each smoothed with `smoothing`;
/// peak needs exactly one curve.
LayerInterval resolve_interval(const IntervalSpec& spec, std::size_t total_layers,
                               const std::vector<LayerCurve>& curves = {},
                               std::size_t smoothing = 1);

/// "single", "sliding:ws,step", "heapsort:c,k" or "bubblesort:c,k".
struct FrameworkSpec {
  enum class Kind { kSingle, kSliding, kHeapsort, kBubblesort };
  Kind kind = Kind::kSingle;
  std::size_t a = 0;  // ws or c
  std::size_t b = 0;  // step or k

  bool setwise() const { return kind == Kind::kHeapsort || kind == Kind::kBubblesort; }
};

FrameworkSpec parse_framework_spec(const std::string& text);

/// "attention", "attention-nocal", "synthetic", "adapter:likelihood" or
/// "adapter:generation".
struct ScorerSpec {
  enum class Kind { kAttention, kAttentionNoCal, kSynthetic, kAdapterLikelihood,
                    kAdapterGeneration };
  Kind kind = Kind::kAttention;

  bool attention() const { return kind == Kind::kAttention || kind == Kind::kAttentionNoCal; }
  bool adapter() const {
    return kind == Kind::kAdapterLikelihood || kind == Kind::kAdapterGeneration;
  }
};

ScorerSpec parse_scorer_spec(const std::string& text);

}  // namespace attnrank
