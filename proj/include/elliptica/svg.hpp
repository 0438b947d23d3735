#pragma once

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace elliptica {

struct SvgSeries {
  std::string name;
  std::vector<double> x, y;
  bool markers = false;
  bool dashed = false;
};

struct SvgPlot {
  std::string title;
  std::string x_label = "r";
  std::string y_label = "u";
  bool log_x = false;
  bool log_y = false;
  std::string provenance;  // embedded in <desc>
  int width = 640, height = 420;
};

namespace detail {

inline std::string xml_escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '&': o += "&amp;"; break;
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '"': o += "&quot;"; break;
      default: o += c;
    }
  }
  return o;
}

inline std::string svg_num(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(2) << v;
  return s.str();
}

inline std::string tick_label(double v) {
  std::ostringstream s;
  s << std::setprecision(3) << v;
  return s.str();
}

}  // namespace detail

/// Standalone line plot. Points that cannot be drawn on a log axis are dropped.
inline std::string render_svg(const SvgPlot& plot, const std::vector<SvgSeries>& series) {
  static const char* colors[] = {"#1f5fa8", "#c0392b", "#2e8b57", "#8e44ad", "#d35400", "#555555"};
  auto tx = [&](double v) { return plot.log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return plot.log_y ? std::log10(v) : v; };
  auto ok = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!plot.log_x || x > 0.0) && (!plot.log_y || y > 0.0);
  };
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series)
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!ok(s.x[i], s.y[i])) continue;
      x0 = std::min(x0, tx(s.x[i]));
      x1 = std::max(x1, tx(s.x[i]));
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 - x0 < 1e-300) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-300) y0 -= 0.5, y1 += 0.5;
  const double ml = 70, mr = 20, mt = 36, mb = 48;
  const double W = plot.width - ml - mr, H = plot.height - mt - mb;
  auto px = [&](double v) { return ml + (tx(v) - x0) / (x1 - x0) * W; };
  auto py = [&](double v) { return mt + (1.0 - (ty(v) - y0) / (y1 - y0)) * H; };
  using detail::svg_num;

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << plot.width << "\" height=\"" << plot.height
    << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  o << "<desc>" << detail::xml_escape(plot.provenance) << "</desc>\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << plot.width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"13\">"
    << detail::xml_escape(plot.title) << "</text>\n";
  o << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << W << "\" height=\"" << H
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    double fx = x0 + (x1 - x0) * k / 4.0, fy = y0 + (y1 - y0) * k / 4.0;
    double vx = plot.log_x ? std::pow(10.0, fx) : fx, vy = plot.log_y ? std::pow(10.0, fy) : fy;
    double X = ml + W * k / 4.0, Y = mt + H * (1.0 - k / 4.0);
    o << "<text x=\"" << svg_num(X) << "\" y=\"" << svg_num(mt + H + 16) << "\" text-anchor=\"middle\">"
      << detail::tick_label(vx) << "</text>\n";
    o << "<text x=\"" << svg_num(ml - 6) << "\" y=\"" << svg_num(Y + 4) << "\" text-anchor=\"end\">"
      << detail::tick_label(vy) << "</text>\n";
  }
  o << "<text x=\"" << svg_num(ml + W / 2) << "\" y=\"" << plot.height - 10 << "\" text-anchor=\"middle\">"
    << detail::xml_escape(plot.x_label + (plot.log_x ? " (log)" : "")) << "</text>\n";
  o << "<text x=\"14\" y=\"" << svg_num(mt + H / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
    << svg_num(mt + H / 2) << ")\">" << detail::xml_escape(plot.y_label + (plot.log_y ? " (log)" : ""))
    << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* c = colors[k % 6];
    std::ostringstream pts;
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i)
      if (ok(s.x[i], s.y[i])) pts << svg_num(px(s.x[i])) << ',' << svg_num(py(s.y[i])) << ' ';
    o << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\""
      << (s.dashed ? " stroke-dasharray=\"5,3\"" : "") << " points=\"" << pts.str() << "\"/>\n";
    if (s.markers)
      for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i)
        if (ok(s.x[i], s.y[i]))
          o << "<circle cx=\"" << svg_num(px(s.x[i])) << "\" cy=\"" << svg_num(py(s.y[i])) << "\" r=\"2.5\" fill=\""
            << c << "\"/>\n";
    o << "<text x=\"" << svg_num(ml + 8) << "\" y=\"" << svg_num(mt + 14 + 14 * k) << "\" fill=\"" << c << "\">"
      << detail::xml_escape(s.name) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace elliptica
