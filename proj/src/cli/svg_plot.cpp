#include "cli/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace arsm::cli {

namespace {

struct Axis {
  double lo = 0.0, hi = 1.0;
  bool log = false;

  double map(double v) const {
    const double t = log ? std::log10(v) : v;
    return (t - lo) / (hi - lo);
  }
  bool usable(double v) const { return std::isfinite(v) && (!log || v > 0.0); }
};

Axis make_axis(const std::vector<double>& vals, bool log,
               std::optional<double> lo_fix, std::optional<double> hi_fix) {
  Axis a;
  a.log = log;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double v : vals) {
    if (!a.usable(v)) continue;
    if (lo_fix && v < *lo_fix) continue;
    if (hi_fix && v > *hi_fix) continue;
    const double t = log ? std::log10(v) : v;
    lo = std::min(lo, t);
    hi = std::max(hi, t);
  }
  if (lo_fix) lo = log ? std::log10(*lo_fix) : *lo_fix;
  if (hi_fix) hi = log ? std::log10(*hi_fix) : *hi_fix;
  if (!std::isfinite(lo) || !std::isfinite(hi)) {
    lo = 0.0;
    hi = 1.0;
  }
  if (hi - lo < 1e-300) {
    lo -= 0.5;
    hi += 0.5;
  }
  if (!lo_fix && !hi_fix && !log) {
    const double pad = 0.03 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
  a.lo = lo;
  a.hi = hi;
  return a;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double t, bool log) {
  char buf[32];
  if (log) {
    std::snprintf(buf, sizeof buf, "1e%d", static_cast<int>(std::lround(t)));
  } else {
    std::snprintf(buf, sizeof buf, "%.3g", t);
  }
  return buf;
}

std::vector<double> ticks(const Axis& a) {
  std::vector<double> out;
  if (a.log) {
    for (double t = std::ceil(a.lo); t <= a.hi + 1e-9; t += 1.0) out.push_back(t);
    return out;
  }
  const double raw = (a.hi - a.lo) / 6.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  }
  for (double t = std::ceil(a.lo / step) * step; t <= a.hi + 1e-9 * step; t += step) {
    out.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
  }
  return out;
}

std::string escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '&': o += "&amp;"; break;
      default: o += c;
    }
  }
  return o;
}

}  // namespace

std::string render_svg(const Plot& plot, int width, int height) {
  const double ml = 70, mr = 20, mt = 36, mb = 52;
  const double pw = width - ml - mr, ph = height - mt - mb;

  std::vector<double> xs, ys;
  for (const auto& s : plot.series) {
    xs.insert(xs.end(), s.x.begin(), s.x.end());
    ys.insert(ys.end(), s.y.begin(), s.y.end());
  }
  const Axis ax = make_axis(xs, plot.logx, std::nullopt, std::nullopt);
  const Axis ay = make_axis(ys, plot.logy, plot.ymin, plot.ymax);
  auto px = [&](double v) { return ml + ax.map(v) * pw; };
  auto py = [&](double v) { return mt + (1.0 - ay.map(v)) * ph; };
  auto inside_y = [&](double v) {
    if (!ay.usable(v)) return false;
    const double t = ay.map(v);
    return t >= -1e-9 && t <= 1.0 + 1e-9;
  };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
     << "\" height=\"" << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
     << escape(plot.title) << "</text>\n";
  os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\""
     << ph << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (double t : ticks(ax)) {
    const double x = ml + (t - ax.lo) / (ax.hi - ax.lo) * pw;
    os << "<line x1=\"" << num(x) << "\" y1=\"" << num(mt + ph) << "\" x2=\"" << num(x)
       << "\" y2=\"" << num(mt + ph + 5) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << num(x) << "\" y=\"" << num(mt + ph + 18)
       << "\" text-anchor=\"middle\">" << tick_label(t, ax.log) << "</text>\n";
  }
  for (double t : ticks(ay)) {
    const double y = mt + (1.0 - (t - ay.lo) / (ay.hi - ay.lo)) * ph;
    os << "<line x1=\"" << num(ml - 5) << "\" y1=\"" << num(y) << "\" x2=\"" << num(ml)
       << "\" y2=\"" << num(y) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << num(ml - 8) << "\" y=\"" << num(y + 4)
       << "\" text-anchor=\"end\">" << tick_label(t, ay.log) << "</text>\n";
  }
  os << "<text x=\"" << num(ml + pw / 2) << "\" y=\"" << height - 12
     << "\" text-anchor=\"middle\">" << escape(plot.xlabel) << "</text>\n";
  os << "<text transform=\"translate(16," << num(mt + ph / 2)
     << ") rotate(-90)\" text-anchor=\"middle\">" << escape(plot.ylabel) << "</text>\n";

  for (double v : plot.vlines) {
    if (!ax.usable(v)) continue;
    const double t = ax.map(v);
    if (t < 0.0 || t > 1.0) continue;
    os << "<line x1=\"" << num(px(v)) << "\" y1=\"" << mt << "\" x2=\"" << num(px(v))
       << "\" y2=\"" << num(mt + ph)
       << "\" stroke=\"#555\" stroke-dasharray=\"2,3\"/>\n";
  }
  for (double v : plot.hlines) {
    if (!inside_y(v)) continue;
    os << "<line x1=\"" << ml << "\" y1=\"" << num(py(v)) << "\" x2=\"" << num(ml + pw)
       << "\" y2=\"" << num(py(v)) << "\" stroke=\"#555\" stroke-dasharray=\"2,3\"/>\n";
  }

  os << "<g fill=\"none\">\n";
  for (const auto& s : plot.series) {
    const std::size_t n = std::min(s.x.size(), s.y.size());
    std::string path;
    bool open = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (!ax.usable(s.x[i]) || !inside_y(s.y[i])) {
        open = false;
        continue;
      }
      path += (open ? " L" : " M") + num(px(s.x[i])) + "," + num(py(s.y[i]));
      open = true;
    }
    if (!s.markers && !path.empty()) {
      os << "<path d=\"" << path << "\" stroke=\"" << s.color << "\" stroke-width=\""
         << s.width << "\"" << (s.dashed ? " stroke-dasharray=\"5,3\"" : "") << "/>\n";
    }
    if (s.markers) {
      for (std::size_t i = 0; i < n; ++i) {
        if (!ax.usable(s.x[i]) || !inside_y(s.y[i])) continue;
        os << "<circle cx=\"" << num(px(s.x[i])) << "\" cy=\"" << num(py(s.y[i]))
           << "\" r=\"3\" stroke=\"" << s.color << "\"/>\n";
      }
    }
  }
  os << "</g>\n";

  double ly = mt + 16;
  for (const auto& s : plot.series) {
    if (s.label.empty()) continue;
    os << "<line x1=\"" << num(ml + pw - 130) << "\" y1=\"" << num(ly - 4) << "\" x2=\""
       << num(ml + pw - 105) << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << s.color
       << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << num(ml + pw - 100) << "\" y=\"" << num(ly) << "\">"
       << escape(s.label) << "</text>\n";
    ly += 16;
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace arsm::cli
