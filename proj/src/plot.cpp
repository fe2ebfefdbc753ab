#include "attnrank/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string_view>

namespace attnrank {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(std::string_view text) {
  std::string out;
  for (char ch : text) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

// Round tick step: 1, 2 or 5 times a power of ten.
double nice_step(double span, int target) {
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0}) {
    if (raw <= m * mag) return m * mag;
  }
  return 10.0 * mag;
}

}  // namespace

std::string render_curves_svg(const std::vector<LayerCurve>& curves, const PlotOptions& opt) {
  if (curves.empty()) throw Error("no curves to plot");
  std::size_t max_layers = 0;
  double lo = INFINITY;
  double hi = -INFINITY;
  for (const auto& c : curves) {
    if (c.num_layers() == 0) throw Error("curve " + c.dataset_id + " is empty");
    max_layers = std::max(max_layers, c.num_layers());
    for (double v : c.per_layer_metric) {
      if (!std::isfinite(v)) throw Error("curve " + c.dataset_id + " has a non-finite value");
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (hi - lo < 1e-9) {
    lo -= 0.05;
    hi += 0.05;
  }
  const double ystep = nice_step(hi - lo, 5);
  lo = std::floor(lo / ystep) * ystep;
  hi = std::ceil(hi / ystep) * ystep;

  const double left = 60, right = 150, top = 40, bottom = 50;
  const double pw = opt.width - left - right;
  const double ph = opt.height - top - bottom;
  const double xspan = max_layers > 1 ? static_cast<double>(max_layers - 1) : 1.0;
  auto px = [&](double layer) { return left + pw * layer / xspan; };
  auto py = [&](double v) { return top + ph * (1.0 - (v - lo) / (hi - lo)); };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(opt.width) +
       "\" height=\"" + std::to_string(opt.height) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!opt.title.empty()) {
    s += "<text x=\"" + num(left + pw / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" +
         escape(opt.title) + "</text>\n";
  }

  // grid and y ticks
  for (double v = lo; v <= hi + ystep * 1e-6; v += ystep) {
    const std::string y = num(py(v));
    s += "<line x1=\"" + num(left) + "\" y1=\"" + y + "\" x2=\"" + num(left + pw) + "\" y2=\"" + y +
         "\" stroke=\"#dddddd\"/>\n";
    s += "<text x=\"" + num(left - 6) + "\" y=\"" + y + "\" text-anchor=\"end\" dy=\"4\">" +
         num(v) + "</text>\n";
  }
  const std::size_t xstep = std::max<std::size_t>(1, static_cast<std::size_t>(nice_step(xspan, 8)));
  for (std::size_t l = 0; l < max_layers; l += xstep) {
    s += "<text x=\"" + num(px(static_cast<double>(l))) + "\" y=\"" + num(top + ph + 16) +
         "\" text-anchor=\"middle\">" + std::to_string(l) + "</text>\n";
  }
  s += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(pw) + "\" height=\"" +
       num(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";
  s += "<text x=\"" + num(left + pw / 2) + "\" y=\"" + num(opt.height - 12.0) +
       "\" text-anchor=\"middle\">layer</text>\n";
  s += "<text transform=\"translate(16," + num(top + ph / 2) +
       ") rotate(-90)\" text-anchor=\"middle\">" + escape(opt.y_label) + "</text>\n";

  for (std::size_t i = 0; i < curves.size(); ++i) {
    const auto& c = curves[i];
    const std::string color = kPalette[i % std::size(kPalette)];
    s += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t l = 0; l < c.num_layers(); ++l) {
      if (l > 0) s += ' ';
      s += num(px(static_cast<double>(l))) + "," + num(py(c.per_layer_metric[l]));
    }
    s += "\"/>\n";
    if (opt.mark_peaks) {
      const std::size_t p = find_peak(c);
      s += "<circle cx=\"" + num(px(static_cast<double>(p))) + "\" cy=\"" +
           num(py(c.per_layer_metric[p])) + "\" r=\"3\" fill=\"" + color + "\"/>\n";
    }
    const double ly = top + 14.0 * static_cast<double>(i) + 6.0;
    s += "<line x1=\"" + num(left + pw + 10) + "\" y1=\"" + num(ly) + "\" x2=\"" +
         num(left + pw + 28) + "\" y2=\"" + num(ly) + "\" stroke=\"" + color +
         "\" stroke-width=\"2\"/>\n";
    const std::string label = c.dataset_id.empty() ? "curve " + std::to_string(i) : c.dataset_id;
    s += "<text x=\"" + num(left + pw + 32) + "\" y=\"" + num(ly + 4) + "\">" + escape(label) +
         "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace attnrank
