#pragma once

#include <string>
#include <vector>

namespace sbm::plot {

enum class Mark { kPoints, kLine, kLineAndPoints };

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  Mark mark = Mark::kLineAndPoints;
  std::string color = "#1f4e79";
  double stroke_width = 1.5;
  bool dashed = false;
};

struct Panel {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
};

// Stacks the panels vertically into one SVG document. Output depends only
// on the inputs; non-finite points are skipped.
std::string render_svg(const std::vector<Panel>& panels, int width = 640, int panel_height = 320);

}  // namespace sbm::plot
