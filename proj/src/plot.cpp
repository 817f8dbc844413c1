#include "twc/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace twc {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
                                    "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#393b79"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

std::pair<double, double> finite_range(const std::vector<double>& v) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const double y : v)
    if (std::isfinite(y)) lo = std::min(lo, y), hi = std::max(hi, y);
  if (!(lo <= hi)) return {0.0, 1.0};
  if (hi - lo < 1e-12) {
    const double pad = std::max(std::abs(lo) * 0.05, 1e-3);
    return {lo - pad, hi + pad};
  }
  return {lo, hi};
}

}  // namespace

std::string render_svg(const std::vector<double>& x, const std::string& x_label, const std::vector<Panel>& panels,
                       int width, int panel_height) {
  constexpr int left = 70, right = 150, top = 24, gap = 46, bottom = 40;
  const int plot_w = width - left - right;
  const int height = top + static_cast<int>(panels.size()) * (panel_height + gap) + bottom;
  const auto [x_lo, x_hi] = finite_range(x);

  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) + "\" height=\"" +
                  std::to_string(height) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (std::size_t p = 0; p < panels.size(); ++p) {
    const Panel& panel = panels[p];
    const double y0 = top + static_cast<double>(p) * (panel_height + gap);
    std::vector<double> all;
    for (const auto& ser : panel.series) all.insert(all.end(), ser.y.begin(), ser.y.end());
    const auto [y_lo, y_hi] = finite_range(all);
    auto px = [&](double v) { return left + (v - x_lo) / (x_hi - x_lo) * plot_w; };
    auto py = [&](double v) { return y0 + panel_height - (v - y_lo) / (y_hi - y_lo) * panel_height; };

    s += "<text x=\"" + num(left) + "\" y=\"" + num(y0 - 6) + "\" font-weight=\"bold\">" + escape(panel.title) +
         "</text>\n";
    s += "<rect x=\"" + num(left) + "\" y=\"" + num(y0) + "\" width=\"" + num(plot_w) + "\" height=\"" +
         num(panel_height) + "\" fill=\"none\" stroke=\"#444\"/>\n";
    for (int t = 0; t <= 4; ++t) {
      const double v = y_lo + (y_hi - y_lo) * t / 4.0;
      s += "<text x=\"" + num(left - 6) + "\" y=\"" + num(py(v) + 4) + "\" text-anchor=\"end\">" + tick(v) +
           "</text>\n";
      s += "<line x1=\"" + num(left) + "\" x2=\"" + num(left + plot_w) + "\" y1=\"" + num(py(v)) + "\" y2=\"" +
           num(py(v)) + "\" stroke=\"#ddd\"/>\n";
    }
    s += "<text transform=\"translate(14," + num(y0 + panel_height / 2.0) + ") rotate(-90)\" text-anchor=\"middle\">" +
         escape(panel.y_label) + "</text>\n";

    for (std::size_t k = 0; k < panel.series.size(); ++k) {
      const Series& ser = panel.series[k];
      const char* colour = kPalette[k % std::size(kPalette)];
      std::string points;
      const std::size_t n = std::min(ser.y.size(), x.size());
      for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(ser.y[i]) || !std::isfinite(x[i])) continue;
        points += num(px(x[i])) + ',' + num(py(ser.y[i])) + ' ';
      }
      if (!points.empty())
        s += "<polyline fill=\"none\" stroke=\"" + std::string(colour) + "\" stroke-width=\"1.2\" points=\"" + points +
             "\"/>\n";
      const double ly = y0 + 12 + 14.0 * static_cast<double>(k);
      s += "<line x1=\"" + num(left + plot_w + 10) + "\" x2=\"" + num(left + plot_w + 28) + "\" y1=\"" + num(ly - 4) +
           "\" y2=\"" + num(ly - 4) + "\" stroke=\"" + colour + "\" stroke-width=\"2\"/>\n";
      s += "<text x=\"" + num(left + plot_w + 32) + "\" y=\"" + num(ly) + "\">" + escape(ser.label) + "</text>\n";
    }
  }

  const double axis_y = top + static_cast<double>(panels.size()) * (panel_height + gap) - gap + 16;
  for (int t = 0; t <= 5; ++t) {
    const double v = x_lo + (x_hi - x_lo) * t / 5.0;
    s += "<text x=\"" + num(left + plot_w * t / 5.0) + "\" y=\"" + num(axis_y) + "\" text-anchor=\"middle\">" +
         tick(v) + "</text>\n";
  }
  s += "<text x=\"" + num(left + plot_w / 2.0) + "\" y=\"" + num(axis_y + 18) + "\" text-anchor=\"middle\">" +
       escape(x_label) + "</text>\n";
  s += "</svg>\n";
  return s;
}

}  // namespace twc
