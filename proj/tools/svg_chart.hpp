#ifndef PRVACC_TOOLS_SVG_CHART_HPP_
#define PRVACC_TOOLS_SVG_CHART_HPP_

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

// Minimal static SVG line charts for the --plot option. Display only.
namespace svg {

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

struct Panel {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  std::vector<Series> series;
};

namespace detail {

constexpr int kWidth = 640;
constexpr int kHeight = 360;
constexpr int kMarginLeft = 70, kMarginRight = 20, kMarginTop = 30,
              kMarginBottom = 45;
constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                   "#9467bd", "#8c564b"};

inline double Transform(double v, bool log_scale) {
  return log_scale ? std::log10(std::max(v, 1e-300)) : v;
}

inline void RenderPanel(std::ostringstream& out, const Panel& panel, int y_off) {
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const Series& s : panel.series) {
    for (const auto& [x, y] : s.points) {
      if (panel.log_y && y <= 0) continue;
      xmin = std::min(xmin, Transform(x, panel.log_x));
      xmax = std::max(xmax, Transform(x, panel.log_x));
      ymin = std::min(ymin, Transform(y, panel.log_y));
      ymax = std::max(ymax, Transform(y, panel.log_y));
    }
  }
  if (xmin > xmax) {
    xmin = 0;
    xmax = 1;
  }
  if (ymin > ymax) {
    ymin = 0;
    ymax = 1;
  }
  if (xmax - xmin < 1e-12) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  if (ymax - ymin < 1e-12) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  const auto px = [&](double x) {
    return kMarginLeft + plot_w * (Transform(x, panel.log_x) - xmin) / (xmax - xmin);
  };
  const auto py = [&](double y) {
    return y_off + kMarginTop +
           plot_h * (1 - (Transform(y, panel.log_y) - ymin) / (ymax - ymin));
  };

  out << "<rect x='" << kMarginLeft << "' y='" << y_off + kMarginTop << "' width='"
      << plot_w << "' height='" << plot_h
      << "' fill='none' stroke='#888' stroke-width='1'/>\n";
  out << "<text x='" << kWidth / 2 << "' y='" << y_off + 18
      << "' text-anchor='middle' font-size='14'>" << panel.title << "</text>\n";
  out << "<text x='" << kWidth / 2 << "' y='" << y_off + kHeight - 8
      << "' text-anchor='middle' font-size='12'>" << panel.x_label << "</text>\n";
  out << "<text x='14' y='" << y_off + kHeight / 2
      << "' text-anchor='middle' font-size='12' transform='rotate(-90 14 "
      << y_off + kHeight / 2 << ")'>" << panel.y_label << "</text>\n";

  // four ticks per axis
  for (int i = 0; i <= 3; ++i) {
    const double tx = xmin + (xmax - xmin) * i / 3;
    const double ty = ymin + (ymax - ymin) * i / 3;
    const double vx = panel.log_x ? std::pow(10, tx) : tx;
    const double vy = panel.log_y ? std::pow(10, ty) : ty;
    char label[32];
    std::snprintf(label, sizeof(label), "%.3g", vx);
    out << "<text x='" << kMarginLeft + plot_w * i / 3 << "' y='"
        << y_off + kMarginTop + plot_h + 16
        << "' text-anchor='middle' font-size='10'>" << label << "</text>\n";
    std::snprintf(label, sizeof(label), "%.3g", vy);
    out << "<text x='" << kMarginLeft - 6 << "' y='"
        << y_off + kMarginTop + plot_h * (3 - i) / 3 + 4
        << "' text-anchor='end' font-size='10'>" << label << "</text>\n";
  }

  int color = 0;
  for (const Series& s : panel.series) {
    out << "<polyline fill='none' stroke='" << kColors[color % 6]
        << "' stroke-width='1.5' points='";
    for (const auto& [x, y] : s.points) {
      if (panel.log_y && y <= 0) continue;
      out << px(x) << ',' << py(y) << ' ';
    }
    out << "'/>\n";
    out << "<text x='" << kWidth - kMarginRight - 4 << "' y='"
        << y_off + kMarginTop + 16 + 14 * color << "' text-anchor='end' fill='"
        << kColors[color % 6] << "' font-size='11'>" << s.label << "</text>\n";
    ++color;
  }
}

}  // namespace detail

inline void WriteChart(const std::string& path, const std::vector<Panel>& panels) {
  std::ostringstream out;
  const int total_height = detail::kHeight * static_cast<int>(panels.size());
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << detail::kWidth
      << "' height='" << total_height << "'>\n";
  out << "<rect width='100%' height='100%' fill='white'/>\n";
  for (std::size_t i = 0; i < panels.size(); ++i) {
    detail::RenderPanel(out, panels[i], static_cast<int>(i) * detail::kHeight);
  }
  out << "</svg>\n";
  std::ofstream file(path);
  if (!file) throw std::runtime_error("cannot write plot file: " + path);
  file << out.str();
}

}  // namespace svg

#endif  // PRVACC_TOOLS_SVG_CHART_HPP_
