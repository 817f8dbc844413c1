#pragma once

// Static SVG line charts for traces and training curves.

#include <string>
#include <vector>

namespace twc {

struct Series {
  std::string label;
  std::vector<double> y;
};

struct Panel {
  std::string title;
  std::string y_label;
  std::vector<Series> series;
};

// Stacks the panels vertically over a shared x axis. Non-finite samples are
// skipped.
std::string render_svg(const std::vector<double>& x, const std::string& x_label, const std::vector<Panel>& panels,
                       int width = 900, int panel_height = 180);

}  // namespace twc
