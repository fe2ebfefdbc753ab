#pragma once

#include <string>
#include <vector>

#include "attnrank/layers.hpp"

namespace attnrank {

struct PlotOptions {
  std::string title;
  std::string y_label = "nDCG@10";
  int width = 640;
  int height = 400;
  bool mark_peaks = true;
};

/// Line chart of layer curves, one polyline per curve, as a standalone SVG
/// document. Output depends only on the inputs.
std::string render_curves_svg(const std::vector<LayerCurve>& curves,
                              const PlotOptions& options = {});

}  // namespace attnrank
