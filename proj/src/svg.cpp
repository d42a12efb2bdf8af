#include "phaseportrait/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "phaseportrait/error.hpp"

namespace phaseportrait {

std::string_view to_string(PlotKind kind) {
  switch (kind) {
    case PlotKind::phase2d: return "phase2d";
    case PlotKind::phase3d_projection: return "phase3d-projection";
    case PlotKind::per_capita: return "per-capita";
    case PlotKind::lorenz: return "lorenz";
    case PlotKind::background_overlay: return "background-overlay";
  }
  return "unknown";
}

namespace {

constexpr double kPanelWidth = 720.0;
constexpr double kHeight = 540.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 30.0;
constexpr double kTop = 50.0;
constexpr double kBottom = 60.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick_text(double v, double step) {
  char buf[32];
  const int decimals = step >= 1.0 ? 0 : static_cast<int>(std::ceil(-std::log10(step)));
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
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

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (!(hi > lo)) {
      const double d = lo == 0.0 ? 1.0 : std::abs(lo) * 0.1;
      lo -= d;
      hi += d;
    }
    const double d = 0.05 * (hi - lo);
    lo -= d;
    hi += d;
  }
};

double nice_step(double span) {
  const double raw = span / 6.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double f = raw / mag;
  return (f < 1.5 ? 1.0 : f < 3.5 ? 2.0 : f < 7.5 ? 5.0 : 10.0) * mag;
}

struct Panel {
  double x0 = 0.0;  ///< left edge of the panel in document units
  Range xr, yr;
  double px(double x) const { return x0 + kLeft + (x - xr.lo) / (xr.hi - xr.lo) * (kPanelWidth - kLeft - kRight); }
  double py(double y) const { return kHeight - kBottom - (y - yr.lo) / (yr.hi - yr.lo) * (kHeight - kTop - kBottom); }
};

void draw_axes(std::ostringstream& os, const Panel& p, const std::string& xlabel, const std::string& ylabel) {
  const double left = p.x0 + kLeft;
  const double right = p.x0 + kPanelWidth - kRight;
  const double top = kTop;
  const double bottom = kHeight - kBottom;
  os << "<rect class=\"frame\" x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\""
     << num(right - left) << "\" height=\"" << num(bottom - top) << "\"/>\n";
  const double xs = nice_step(p.xr.hi - p.xr.lo);
  for (double t = std::ceil(p.xr.lo / xs) * xs; t <= p.xr.hi + 1e-9 * xs; t += xs) {
    const double x = p.px(t);
    os << "<line class=\"tick\" x1=\"" << num(x) << "\" y1=\"" << num(bottom) << "\" x2=\"" << num(x)
       << "\" y2=\"" << num(bottom + 5) << "\"/>"
       << "<text class=\"ticklabel\" x=\"" << num(x) << "\" y=\"" << num(bottom + 18)
       << "\" text-anchor=\"middle\">" << tick_text(t, xs) << "</text>\n";
  }
  const double ys = nice_step(p.yr.hi - p.yr.lo);
  for (double t = std::ceil(p.yr.lo / ys) * ys; t <= p.yr.hi + 1e-9 * ys; t += ys) {
    const double y = p.py(t);
    os << "<line class=\"tick\" x1=\"" << num(left - 5) << "\" y1=\"" << num(y) << "\" x2=\"" << num(left)
       << "\" y2=\"" << num(y) << "\"/>"
       << "<text class=\"ticklabel\" x=\"" << num(left - 8) << "\" y=\"" << num(y + 4)
       << "\" text-anchor=\"end\">" << tick_text(t, ys) << "</text>\n";
  }
  os << "<text class=\"axislabel\" x=\"" << num(0.5 * (left + right)) << "\" y=\"" << num(kHeight - 15)
     << "\" text-anchor=\"middle\">" << escape(xlabel) << "</text>\n";
  os << "<text class=\"axislabel\" transform=\"translate(" << num(p.x0 + 20) << "," << num(0.5 * (top + bottom))
     << ") rotate(-90)\" text-anchor=\"middle\">" << escape(ylabel) << "</text>\n";
}

void draw_series(std::ostringstream& os, const Panel& p, const PlotSeries& s, bool use_z, bool label_points,
                 const std::string& clip_id, std::size_t index) {
  os << "<g class=\"series\" id=\"s" << index << (use_z ? "z" : "") << "\" data-name=\"" << escape(s.name)
     << "\" data-source=\"" << escape(s.source_op) << "\" clip-path=\"url(#" << clip_id << ")\">\n";
  auto coord = [&](std::size_t i) {
    return Eigen::Vector2d(p.px(use_z ? s.z[i] : s.points[i].x()), p.py(s.points[i].y()));
  };
  if (s.style != SeriesStyle::markers && s.points.size() >= 2) {
    os << "<polyline class=\"" << (s.style == SeriesStyle::timeline ? "timeline" : "curve")
       << "\" fill=\"none\" stroke=\"" << s.color << "\" points=\"";
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      const auto c = coord(i);
      os << (i ? " " : "") << num(c.x()) << "," << num(c.y());
    }
    os << "\"/>\n";
  }
  if (s.style != SeriesStyle::curve) {
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      const auto c = coord(i);
      os << "<circle class=\"marker\" cx=\"" << num(c.x()) << "\" cy=\"" << num(c.y()) << "\" r=\"3\" fill=\""
         << s.color << "\"/>\n";
    }
  }
  if (label_points && s.labels.size() == s.points.size()) {
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      const auto c = coord(i);
      os << "<text class=\"pointlabel\" x=\"" << num(c.x() + 4) << "\" y=\"" << num(c.y() - 4) << "\">"
         << s.labels[i] << "</text>\n";
    }
  }
  os << "</g>\n";
}

}  // namespace

std::string render_plot(const PlotSpec& spec, const std::vector<PlotSeries>& data) {
  const bool has_points = std::any_of(data.begin(), data.end(), [](const PlotSeries& s) { return !s.points.empty(); });
  if (!has_points) throw Error(ErrorKind::validation, "cli-report", "nothing to plot");
  const bool two_panels = spec.kind == PlotKind::phase3d_projection;
  if (two_panels) {
    for (const auto& s : data)
      if (s.z.size() != s.points.size())
        throw Error(ErrorKind::validation, "cli-report", "3D projection needs a z value per point", s.name);
  }

  Panel main, side;
  side.x0 = kPanelWidth;
  for (const auto& s : data) {
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      main.xr.add(s.points[i].x());
      if (!spec.y_range) main.yr.add(s.points[i].y());
      if (two_panels) side.xr.add(s.z[i]);
    }
  }
  for (const auto& g : spec.guides) main.yr.add(g.y);
  if (spec.y_range) {
    main.yr.lo = spec.y_range->first;
    main.yr.hi = spec.y_range->second;
  } else {
    main.yr.pad();
  }
  main.xr.pad();
  side.xr.pad();
  side.yr = main.yr;

  const double width = two_panels ? 2.0 * kPanelWidth : kPanelWidth;
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(kHeight)
     << "\" viewBox=\"0 0 " << num(width) << " " << num(kHeight) << "\" data-kind=\"" << to_string(spec.kind)
     << "\">\n";
  os << "<metadata>\n";
  for (std::size_t i = 0; i < data.size(); ++i)
    os << "<series index=\"" << i << "\" name=\"" << escape(data[i].name) << "\" source=\""
       << escape(data[i].source_op) << "\" points=\"" << data[i].points.size() << "\"/>\n";
  os << "</metadata>\n";
  os << "<style>\n"
        ".frame { fill: none; stroke: #333; }\n"
        ".tick { stroke: #333; }\n"
        "text { font-family: sans-serif; font-size: 11px; }\n"
        ".title { font-size: 15px; }\n"
        ".pointlabel { font-size: 8px; fill: #555; }\n"
        ".guide { stroke: #2c7bb6; stroke-dasharray: 6 4; }\n"
        "polyline { stroke-width: 1.5; }\n"
        "</style>\n";
  os << "<defs>\n";
  const int panels = two_panels ? 2 : 1;
  for (int k = 0; k < panels; ++k) {
    const double x0 = k * kPanelWidth;
    os << "<clipPath id=\"plot" << k << "\"><rect x=\"" << num(x0 + kLeft) << "\" y=\"" << num(kTop)
       << "\" width=\"" << num(kPanelWidth - kLeft - kRight) << "\" height=\"" << num(kHeight - kTop - kBottom)
       << "\"/></clipPath>\n";
  }
  os << "</defs>\n";
  os << "<text class=\"title\" x=\"" << num(kLeft) << "\" y=\"28\">" << escape(spec.title) << "</text>\n";

  draw_axes(os, main, spec.x_label, spec.y_label);
  for (const auto& g : spec.guides) {
    const double y = main.py(g.y);
    os << "<line class=\"guide\" x1=\"" << num(kLeft) << "\" y1=\"" << num(y) << "\" x2=\""
       << num(kPanelWidth - kRight) << "\" y2=\"" << num(y) << "\"/>"
       << "<text class=\"guidelabel\" x=\"" << num(kPanelWidth - kRight - 4) << "\" y=\"" << num(y - 4)
       << "\" text-anchor=\"end\">" << escape(g.label) << "</text>\n";
  }
  for (std::size_t i = 0; i < data.size(); ++i) draw_series(os, main, data[i], false, spec.label_points, "plot0", i);

  if (two_panels) {
    draw_axes(os, side, spec.z_label, spec.y_label);
    for (std::size_t i = 0; i < data.size(); ++i) draw_series(os, side, data[i], true, spec.label_points, "plot1", i);
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace phaseportrait
