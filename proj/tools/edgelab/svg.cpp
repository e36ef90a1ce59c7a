#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace edgelab::tools {

namespace {

constexpr double kWidth = 720, kHeight = 480;
constexpr double kLeft = 80, kRight = 220, kTop = 40, kBottom = 60;
constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v, bool log) {
  char buf[32];
  if (log) {
    std::snprintf(buf, sizeof buf, "%.3g", std::pow(10.0, v));
  } else {
    std::snprintf(buf, sizeof buf, "%.3g", v);
  }
  return buf;
}

struct Axis {
  double lo = 0, hi = 1;
  bool log = false;
  double map(double v) const { return log ? std::log10(v) : v; }
  bool valid(double v) const { return std::isfinite(v) && (!log || v > 0.0); }
};

std::vector<double> ticks(const Axis& a) {
  std::vector<double> t;
  if (a.log) {
    for (double e = std::ceil(a.lo - 1e-9); e <= a.hi + 1e-9; e += 1.0) t.push_back(e);
    if (t.size() < 2) t = {a.lo, a.hi};
    return t;
  }
  const double span = a.hi - a.lo;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  for (double v = std::ceil(a.lo / step) * step; v <= a.hi + 1e-9 * span; v += step) t.push_back(v);
  return t;
}

}  // namespace

std::string render_svg(const PlotSpec& plot) {
  Axis ax{0, 1, plot.log_x}, ay{0, 1, plot.log_y};
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  for (const auto& s : plot.series)
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!ax.valid(s.x[i]) || !ay.valid(s.y[i])) continue;
      xmin = std::min(xmin, ax.map(s.x[i]));
      xmax = std::max(xmax, ax.map(s.x[i]));
      ymin = std::min(ymin, ay.map(s.y[i]));
      ymax = std::max(ymax, ay.map(s.y[i]));
    }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (xmax - xmin < 1e-12) xmin -= 0.5, xmax += 0.5;
  if (ymax - ymin < 1e-12) ymin -= 0.5, ymax += 0.5;
  const double padx = 0.05 * (xmax - xmin), pady = 0.08 * (ymax - ymin);
  ax.lo = xmin - padx;
  ax.hi = xmax + padx;
  ay.lo = ymin - pady;
  ay.hi = ymax + pady;
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  const auto px = [&](double v) { return kLeft + (v - ax.lo) / (ax.hi - ax.lo) * pw; };
  const auto py = [&](double v) { return kTop + ph - (v - ay.lo) / (ay.hi - ay.lo) * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
  os << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
     << escape(plot.title) << "</text>\n";
  os << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(pw) << "\" height=\"" << num(ph)
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : ticks(ax)) {
    if (t < ax.lo || t > ax.hi) continue;
    os << "<line x1=\"" << num(px(t)) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(px(t)) << "\" y2=\""
       << num(kTop + ph) << "\" stroke=\"#dddddd\"/>\n";
    os << "<text x=\"" << num(px(t)) << "\" y=\"" << num(kTop + ph + 18) << "\" text-anchor=\"middle\">"
       << tick_label(t, ax.log) << "</text>\n";
  }
  for (double t : ticks(ay)) {
    if (t < ay.lo || t > ay.hi) continue;
    os << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(py(t)) << "\" x2=\"" << num(kLeft + pw) << "\" y2=\""
       << num(py(t)) << "\" stroke=\"#dddddd\"/>\n";
    os << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(py(t) + 4) << "\" text-anchor=\"end\">"
       << tick_label(t, ay.log) << "</text>\n";
  }
  os << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 16) << "\" text-anchor=\"middle\">"
     << escape(plot.x_label) << (ax.log ? " (log)" : "") << "</text>\n";
  os << "<text x=\"18\" y=\"" << num(kTop + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
     << num(kTop + ph / 2) << ")\">" << escape(plot.y_label) << (ay.log ? " (log)" : "") << "</text>\n";

  std::size_t color = 0;
  double legend_y = kTop + 10;
  for (const auto& s : plot.series) {
    const char* c = kColors[color++ % (sizeof kColors / sizeof kColors[0])];
    std::string d;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!ax.valid(s.x[i]) || !ay.valid(s.y[i])) continue;
      d += (d.empty() ? "M" : " L") + num(px(ax.map(s.x[i]))) + " " + num(py(ay.map(s.y[i])));
    }
    if (!d.empty()) {
      os << "<path d=\"" << d << "\" fill=\"none\" stroke=\"" << c << "\" stroke-width=\"2\""
         << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>\n";
      if (!s.dashed)
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
          if (!ax.valid(s.x[i]) || !ay.valid(s.y[i])) continue;
          const double cx = px(ax.map(s.x[i])), cy = py(ay.map(s.y[i]));
          os << "<path d=\"M" << num(cx - 3) << ' ' << num(cy) << " L" << num(cx) << ' ' << num(cy - 3) << " L"
             << num(cx + 3) << ' ' << num(cy) << " L" << num(cx) << ' ' << num(cy + 3) << " Z\" fill=\"" << c
             << "\"/>\n";
        }
    }
    const double lx = kLeft + pw + 12;
    os << "<line x1=\"" << num(lx) << "\" y1=\"" << num(legend_y) << "\" x2=\"" << num(lx + 22) << "\" y2=\""
       << num(legend_y) << "\" stroke=\"" << c << "\" stroke-width=\"2\""
       << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>\n";
    os << "<text x=\"" << num(lx + 28) << "\" y=\"" << num(legend_y + 4) << "\" font-size=\"11\">" << escape(s.label)
       << "</text>\n";
    legend_y += 18;
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace edgelab::tools
