#include "gpduo/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "gpduo/errors.hpp"

namespace gpduo::svg {

namespace {

constexpr double kWidth = 640, kHeight = 440;
constexpr double kLeft = 80, kRight = 160, kTop = 40, kBottom = 60;

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string f(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

struct Axis {
  bool log = false;
  double lo = 0, hi = 1;

  double t(double v) const { return log ? std::log10(v) : v; }
  double frac(double v) const { return (t(v) - lo) / (hi - lo); }
};

Axis make_axis(const std::vector<Series>& series, bool x, bool log) {
  Axis a;
  a.log = log;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& s : series)
    for (double v : x ? s.x : s.y) {
      if (!std::isfinite(v) || (log && !(v > 0))) continue;
      lo = std::min(lo, a.t(v));
      hi = std::max(hi, a.t(v));
    }
  require(std::isfinite(lo), "plot has no drawable points");
  if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double pad = 0.05 * (hi - lo);
  a.lo = lo - pad;
  a.hi = hi + pad;
  return a;
}

std::string tick_label(const Axis& a, double t) {
  char buf[32];
  if (a.log) std::snprintf(buf, sizeof buf, "1e%.3g", t);
  else std::snprintf(buf, sizeof buf, "%.3g", t);
  return buf;
}

}  // namespace

std::string render(const Plot& plot) {
  require(!plot.series.empty(), "plot has no series");
  const Axis ax = make_axis(plot.series, true, plot.log_x);
  const Axis ay = make_axis(plot.series, false, plot.log_y);
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double v) { return kLeft + ax.frac(v) * pw; };
  auto py = [&](double v) { return kTop + (1 - ay.frac(v)) * ph; };

  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + f(kWidth) + "\" height=\"" +
                  f(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + f(kLeft + pw / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" +
       escape(plot.title) + "</text>\n";
  s += "<rect x=\"" + f(kLeft) + "\" y=\"" + f(kTop) + "\" width=\"" + f(pw) + "\" height=\"" + f(ph) +
       "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double tx = ax.lo + (ax.hi - ax.lo) * k / 4, ty = ay.lo + (ay.hi - ay.lo) * k / 4;
    const double gx = kLeft + pw * k / 4, gy = kTop + ph * (1 - k / 4.0);
    s += "<line x1=\"" + f(gx) + "\" y1=\"" + f(kTop + ph) + "\" x2=\"" + f(gx) + "\" y2=\"" +
         f(kTop + ph + 5) + "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + f(gx) + "\" y=\"" + f(kTop + ph + 18) + "\" text-anchor=\"middle\">" +
         tick_label(ax, tx) + "</text>\n";
    s += "<line x1=\"" + f(kLeft - 5) + "\" y1=\"" + f(gy) + "\" x2=\"" + f(kLeft) + "\" y2=\"" + f(gy) +
         "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + f(kLeft - 8) + "\" y=\"" + f(gy + 4) + "\" text-anchor=\"end\">" +
         tick_label(ay, ty) + "</text>\n";
  }
  s += "<text x=\"" + f(kLeft + pw / 2) + "\" y=\"" + f(kHeight - 16) + "\" text-anchor=\"middle\">" +
       escape(plot.xlabel) + "</text>\n";
  s += "<text transform=\"translate(18," + f(kTop + ph / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
       escape(plot.ylabel) + "</text>\n";

  double ly = kTop + 10;
  for (const auto& ser : plot.series) {
    std::string pts;
    for (std::size_t i = 0; i < ser.x.size() && i < ser.y.size(); ++i) {
      const double x = ser.x[i], y = ser.y[i];
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      if ((plot.log_x && !(x > 0)) || (plot.log_y && !(y > 0))) continue;
      if (ser.markers)
        s += "<circle cx=\"" + f(px(x)) + "\" cy=\"" + f(py(y)) + "\" r=\"3\" fill=\"" + ser.color + "\"/>\n";
      else
        pts += f(px(x)) + "," + f(py(y)) + " ";
    }
    if (!ser.markers && !pts.empty())
      s += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + ser.color +
           "\" stroke-width=\"1.5\"/>\n";
    s += "<rect x=\"" + f(kLeft + pw + 12) + "\" y=\"" + f(ly - 8) + "\" width=\"10\" height=\"10\" fill=\"" +
         ser.color + "\"/>\n";
    s += "<text x=\"" + f(kLeft + pw + 28) + "\" y=\"" + f(ly + 1) + "\">" + escape(ser.label) + "</text>\n";
    ly += 18;
  }
  s += "</svg>\n";
  return s;
}

}  // namespace gpduo::svg
