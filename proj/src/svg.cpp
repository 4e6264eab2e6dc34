#include "fmca/svg.hpp"

#include "fmca/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace fmca {

namespace {

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
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

// Roughly five round tick values covering [lo, hi].
std::vector<double> ticks(double lo, double hi) {
  const double raw = (hi - lo) / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  std::vector<double> out;
  for (double t = std::ceil(lo / step) * step; t <= hi + step * 1e-9; t += step) out.push_back(t);
  return out;
}

} // namespace

std::string render_svg(const Plot& plot) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : plot.series) {
    if (s.x.size() != s.y.size()) throw InvalidArgumentError("series x and y lengths differ");
    for (double v : s.x)
      if (std::isfinite(v)) x0 = std::min(x0, v), x1 = std::max(x1, v);
    for (double v : s.y)
      if (std::isfinite(v)) y0 = std::min(y0, v), y1 = std::max(y1, v);
  }
  if (!(x0 <= x1)) x0 = 0.0, x1 = 1.0;
  if (!(y0 <= y1)) y0 = 0.0, y1 = 1.0;
  if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;

  const double left = 64, right = 150, top = 36, bottom = 48;
  const double pw = plot.width - left - right, ph = plot.height - top - bottom;
  auto sx = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto sy = [&](double y) { return top + (1.0 - (y - y0) / (y1 - y0)) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << plot.width << "\" height=\"" << plot.height
    << "\" viewBox=\"0 0 " << plot.width << ' ' << plot.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << fmt(left + pw / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << escape(plot.title)
    << "</text>\n";
  o << "<rect x=\"" << fmt(left) << "\" y=\"" << fmt(top) << "\" width=\"" << fmt(pw) << "\" height=\"" << fmt(ph)
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : ticks(x0, x1)) {
    o << "<line x1=\"" << fmt(sx(t)) << "\" y1=\"" << fmt(top + ph) << "\" x2=\"" << fmt(sx(t)) << "\" y2=\""
      << fmt(top + ph + 5) << "\" stroke=\"black\"/>";
    o << "<text x=\"" << fmt(sx(t)) << "\" y=\"" << fmt(top + ph + 18) << "\" text-anchor=\"middle\">" << tick_label(t)
      << "</text>\n";
  }
  for (double t : ticks(y0, y1)) {
    o << "<line x1=\"" << fmt(left - 5) << "\" y1=\"" << fmt(sy(t)) << "\" x2=\"" << fmt(left) << "\" y2=\""
      << fmt(sy(t)) << "\" stroke=\"black\"/>";
    o << "<text x=\"" << fmt(left - 8) << "\" y=\"" << fmt(sy(t) + 4) << "\" text-anchor=\"end\">" << tick_label(t)
      << "</text>\n";
  }
  o << "<text x=\"" << fmt(left + pw / 2) << "\" y=\"" << plot.height - 10 << "\" text-anchor=\"middle\">"
    << escape(plot.x_label) << "</text>\n";
  o << "<text transform=\"translate(16 " << fmt(top + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
    << escape(plot.y_label) << "</text>\n";

  for (std::size_t k = 0; k < plot.series.size(); ++k) {
    const auto& s = plot.series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    if (plot.points) {
      for (std::size_t i = 0; i < s.x.size(); ++i)
        if (std::isfinite(s.x[i]) && std::isfinite(s.y[i]))
          o << "<circle cx=\"" << fmt(sx(s.x[i])) << "\" cy=\"" << fmt(sy(s.y[i])) << "\" r=\"2.5\" fill=\"" << color
            << "\"/>\n";
    } else {
      o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i)
        if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) o << fmt(sx(s.x[i])) << ',' << fmt(sy(s.y[i])) << ' ';
      o << "\"/>\n";
    }
    const double ly = top + 14 + 18.0 * static_cast<double>(k);
    o << "<line x1=\"" << fmt(left + pw + 12) << "\" y1=\"" << fmt(ly - 4) << "\" x2=\"" << fmt(left + pw + 32)
      << "\" y2=\"" << fmt(ly - 4) << "\" stroke=\"" << color << "\" stroke-width=\"3\"/>";
    o << "<text x=\"" << fmt(left + pw + 38) << "\" y=\"" << fmt(ly) << "\">" << escape(s.label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

} // namespace fmca
