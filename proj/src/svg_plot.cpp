#include "sbm/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace sbm::plot {
namespace {

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  if (std::abs(v) < 1e-12) v = 0.0;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void include(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finalize() {
    if (!std::isfinite(lo)) {
      lo = 0.0;
      hi = 1.0;
    }
    if (hi - lo < 1e-12) {
      lo -= 0.5;
      hi += 0.5;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
};

// Roughly five ticks at a 1-2-5 step.
std::vector<double> ticks(const Range& r) {
  const double raw = (r.hi - r.lo) / 5.0;
  const double magnitude = std::pow(10.0, std::floor(std::log10(raw)));
  double step = magnitude;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * magnitude;
    if (step >= raw) break;
  }
  std::vector<double> out;
  for (double t = std::ceil(r.lo / step) * step; t <= r.hi + 1e-9 * step; t += step) {
    out.push_back(t);
  }
  return out;
}

void render_panel(std::ostringstream& svg, const Panel& panel, double top, int width,
                  int height) {
  const double left = 70.0;
  const double right = width - 20.0;
  const double plot_top = top + 30.0;
  const double bottom = top + height - 45.0;

  Range xr;
  Range yr;
  for (const auto& s : panel.series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) {
        xr.include(s.x[i]);
        yr.include(s.y[i]);
      }
    }
  }
  xr.finalize();
  yr.finalize();
  auto px = [&](double x) { return left + (x - xr.lo) / (xr.hi - xr.lo) * (right - left); };
  auto py = [&](double y) { return bottom - (y - yr.lo) / (yr.hi - yr.lo) * (bottom - plot_top); };

  svg << "<g>\n";
  svg << "<text x=\"" << fixed(width / 2.0) << "\" y=\"" << fixed(top + 18.0)
      << "\" text-anchor=\"middle\" font-size=\"14\">" << escape(panel.title) << "</text>\n";
  svg << "<rect x=\"" << fixed(left) << "\" y=\"" << fixed(plot_top) << "\" width=\""
      << fixed(right - left) << "\" height=\"" << fixed(bottom - plot_top)
      << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (double t : ticks(xr)) {
    svg << "<line x1=\"" << fixed(px(t)) << "\" y1=\"" << fixed(bottom) << "\" x2=\"" << fixed(px(t))
        << "\" y2=\"" << fixed(bottom + 5.0) << "\" stroke=\"#444\"/>\n";
    svg << "<text x=\"" << fixed(px(t)) << "\" y=\"" << fixed(bottom + 18.0)
        << "\" text-anchor=\"middle\" font-size=\"11\">" << tick_label(t) << "</text>\n";
  }
  for (double t : ticks(yr)) {
    svg << "<line x1=\"" << fixed(left - 5.0) << "\" y1=\"" << fixed(py(t)) << "\" x2=\""
        << fixed(left) << "\" y2=\"" << fixed(py(t)) << "\" stroke=\"#444\"/>\n";
    svg << "<text x=\"" << fixed(left - 8.0) << "\" y=\"" << fixed(py(t) + 4.0)
        << "\" text-anchor=\"end\" font-size=\"11\">" << tick_label(t) << "</text>\n";
  }
  svg << "<text x=\"" << fixed((left + right) / 2.0) << "\" y=\"" << fixed(bottom + 36.0)
      << "\" text-anchor=\"middle\" font-size=\"12\">" << escape(panel.x_label) << "</text>\n";
  svg << "<text x=\"16\" y=\"" << fixed((plot_top + bottom) / 2.0)
      << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
      << fixed((plot_top + bottom) / 2.0) << ")\">" << escape(panel.y_label) << "</text>\n";

  double legend_y = plot_top + 14.0;
  for (const auto& s : panel.series) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) pts.emplace_back(px(s.x[i]), py(s.y[i]));
    }
    const std::string dash = s.dashed ? " stroke-dasharray=\"6 4\"" : "";
    if (s.mark != Mark::kPoints && pts.size() > 1) {
      svg << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\""
          << fixed(s.stroke_width) << "\"" << dash << " points=\"";
      for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i) svg << ' ';
        svg << fixed(pts[i].first) << ',' << fixed(pts[i].second);
      }
      svg << "\"/>\n";
    }
    if (s.mark != Mark::kLine) {
      for (const auto& [x, y] : pts) {
        svg << "<circle cx=\"" << fixed(x) << "\" cy=\"" << fixed(y) << "\" r=\"2.5\" fill=\""
            << s.color << "\" fill-opacity=\"0.6\"/>\n";
      }
    }
    if (!s.label.empty()) {
      svg << "<line x1=\"" << fixed(right - 150.0) << "\" y1=\"" << fixed(legend_y - 4.0)
          << "\" x2=\"" << fixed(right - 125.0) << "\" y2=\"" << fixed(legend_y - 4.0)
          << "\" stroke=\"" << s.color << "\" stroke-width=\"" << fixed(s.stroke_width) << "\""
          << dash << "/>\n";
      svg << "<text x=\"" << fixed(right - 120.0) << "\" y=\"" << fixed(legend_y)
          << "\" font-size=\"11\">" << escape(s.label) << "</text>\n";
      legend_y += 15.0;
    }
  }
  svg << "</g>\n";
}

}  // namespace

std::string render_svg(const std::vector<Panel>& panels, int width, int panel_height) {
  std::ostringstream svg;
  const int height = panel_height * static_cast<int>(panels.size());
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t i = 0; i < panels.size(); ++i) {
    render_panel(svg, panels[i], static_cast<double>(i) * panel_height, width, panel_height);
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace sbm::plot
