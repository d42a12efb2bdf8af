#include "phaseportrait/phase_geometry.hpp"

#include <algorithm>
#include <cmath>

#include "phaseportrait/envelope_fit.hpp"
#include "phaseportrait/error.hpp"

namespace phaseportrait {

namespace {

constexpr const char* kModule = "phase-geometry";

double cross(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return a.x() * b.y() - a.y() * b.x();
}

struct AxisScale {
  double offset = 0.0;
  double span = 1.0;
};

AxisScale axis_scale(const std::vector<PhasePoint>& pts, double PhasePoint::*field) {
  auto [lo, hi] = std::minmax_element(pts.begin(), pts.end(), [&](const PhasePoint& a, const PhasePoint& b) {
    return a.*field < b.*field;
  });
  double span = (*hi).*field - (*lo).*field;
  return {(*lo).*field, span > 0.0 ? span : 1.0};
}

std::ptrdiff_t index_of(const PhaseTrajectory& traj, int year) {
  const auto& pts = traj.points();
  auto it = std::lower_bound(pts.begin(), pts.end(), year,
                             [](const PhasePoint& p, int y) { return p.year < y; });
  if (it == pts.end() || it->year != year) return -1;
  return it - pts.begin();
}

}  // namespace

PhaseTrajectory::PhaseTrajectory(std::vector<PhasePoint> points, bool normalized)
    : points_(std::move(points)), normalized_(normalized) {
  if (points_.size() < 3)
    throw Error(ErrorKind::validation, kModule, "trajectory needs at least 3 points");
  dimensionality_ = points_.front().z ? 3 : 2;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto& p = points_[i];
    const std::string where = "year " + std::to_string(p.year);
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || (p.z && !std::isfinite(*p.z)))
      throw Error(ErrorKind::validation, kModule, "non-finite phase point", where);
    if ((p.z.has_value() ? 3 : 2) != dimensionality_)
      throw Error(ErrorKind::validation, kModule, "mixed dimensionality", where);
    if (i > 0 && p.year <= points_[i - 1].year)
      throw Error(ErrorKind::validation, kModule, "years must be strictly increasing", where);
  }
}

std::vector<Eigen::Vector2d> PhaseTrajectory::unit_scaled_xy() const {
  auto sx = axis_scale(points_, &PhasePoint::x);
  auto sy = axis_scale(points_, &PhasePoint::y);
  std::vector<Eigen::Vector2d> out;
  out.reserve(points_.size());
  for (const auto& p : points_)
    out.emplace_back((p.x - sx.offset) / sx.span, (p.y - sy.offset) / sy.span);
  return out;
}

PhaseTrajectory build_trajectory(const Dataset& dataset, const AxisSpec& axes) {
  Series xs = axes.x == XAxis::production ? dataset.production_series() : per_capita(dataset);
  Series ys = dataset.price_series();
  std::optional<Series> zs;
  switch (axes.z) {
    case ZAxis::none:
      break;
    case ZAxis::eroei_model: {
      auto model = axes.model.value_or(EroeiModel::default_for(dataset));
      Series e;
      for (const auto& r : dataset.records()) e.push_back({r.year, eroei_at(model, r.year).value});
      zs = std::move(e);
      break;
    }
    case ZAxis::eroei_per_year: {
      if (!dataset.has_eroei())
        throw Error(ErrorKind::configuration, kModule, "z axis needs an eroei column", "eroei");
      Series e;
      for (const auto& r : dataset.records()) e.push_back({r.year, *r.eroei});
      zs = std::move(e);
      break;
    }
  }
  if (axes.normalize_year) {
    xs = nondimensionalize(xs, *axes.normalize_year);
    ys = nondimensionalize(ys, *axes.normalize_year);
    if (zs) zs = nondimensionalize(*zs, *axes.normalize_year);
  }
  std::vector<PhasePoint> pts;
  pts.reserve(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    PhasePoint p{xs[i].year, xs[i].value, ys[i].value, std::nullopt};
    if (zs) p.z = (*zs)[i].value;
    pts.push_back(p);
  }
  return PhaseTrajectory(std::move(pts), axes.normalize_year.has_value());
}

CrossingReport find_crossings(const PhaseTrajectory& traj) {
  const auto pts = traj.unit_scaled_xy();
  const auto sx = axis_scale(traj.points(), &PhasePoint::x);
  const auto sy = axis_scale(traj.points(), &PhasePoint::y);
  const std::size_t nseg = pts.size() - 1;
  const double tol = kIntersectionTolerance;

  CrossingReport report;
  for (std::size_t a = 0; a + 2 < nseg; ++a) {
    const Eigen::Vector2d p = pts[a];
    const Eigen::Vector2d r = pts[a + 1] - p;
    for (std::size_t b = a + 2; b < nseg; ++b) {
      const Eigen::Vector2d q = pts[b];
      const Eigen::Vector2d s = pts[b + 1] - q;
      const double denom = cross(r, s);
      const Eigen::Vector2d qp = q - p;
      const double rn = r.norm();
      const double sn = s.norm();

      if (std::abs(denom) <= tol * std::max(rn * sn, tol)) {
        // Parallel. Collinear pairs that overlap over a positive length are
        // reported as degenerate; touching end-to-end is handled as a point.
        if (rn == 0.0 || std::abs(cross(qp, r)) > tol * rn) continue;
        const double t0 = qp.dot(r) / (rn * rn);
        const double t1 = t0 + s.dot(r) / (rn * rn);
        const double lo = std::max(0.0, std::min(t0, t1));
        const double hi = std::min(1.0, std::max(t0, t1));
        if ((hi - lo) * rn > tol) report.overlaps.push_back({a, b});
        continue;
      }

      double t = cross(qp, s) / denom;
      double u = cross(qp, r) / denom;
      const double tt = rn > 0.0 ? tol / rn : tol;
      const double tu = sn > 0.0 ? tol / sn : tol;
      if (t < -tt || t > 1.0 + tt || u < -tu || u > 1.0 + tu) continue;
      t = std::clamp(t, 0.0, 1.0);
      u = std::clamp(u, 0.0, 1.0);

      // A contact at a shared vertex is attributed to the segment that starts
      // there, so each geometric event is counted once.
      if (t >= 1.0 - tt && b >= a + 3) continue;
      if (u >= 1.0 - tu && b + 1 < nseg) continue;
      // The polyline's own terminal vertices do not cross anything.
      if ((a == 0 && t <= tt) || (b + 1 == nseg && u >= 1.0 - tu)) continue;

      const Eigen::Vector2d hit = p + t * r;
      Crossing c;
      c.seg_a = a;
      c.seg_b = b;
      c.location = {hit.x() * sx.span + sx.offset, hit.y() * sy.span + sy.offset};
      c.param_a = t;
      c.param_b = u;
      report.crossings.push_back(c);
    }
  }
  return report;
}

double shoelace_area(const std::vector<Eigen::Vector2d>& polygon) {
  double twice = 0.0;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) twice += cross(polygon[i], polygon[(i + 1) % n]);
  return 0.5 * twice;
}

LoopReport extract_loops(const PhaseTrajectory& traj, const std::vector<Crossing>& crossings) {
  const auto pts = traj.unit_scaled_xy();
  LoopReport report;
  for (const auto& c : crossings) {
    if (c.seg_b < c.seg_a + 2 || c.seg_b + 1 >= pts.size())
      throw Error(ErrorKind::validation, kModule, "crossing does not belong to this trajectory",
                  std::to_string(c.seg_a) + "/" + std::to_string(c.seg_b));
    Loop loop;
    loop.anchor = LoopAnchor::crossing;
    loop.start_crossing = c;
    loop.first_year = traj.points()[c.seg_a + 1].year;
    loop.last_year = traj.points()[c.seg_b].year;
    const Eigen::Vector2d hit = pts[c.seg_a] + c.param_a * (pts[c.seg_a + 1] - pts[c.seg_a]);
    loop.vertex_chain.push_back(hit);
    for (std::size_t i = c.seg_a + 1; i <= c.seg_b; ++i) loop.vertex_chain.push_back(pts[i]);
    loop.signed_area = shoelace_area(loop.vertex_chain);
    if (loop.signed_area == 0.0) {
      report.diagnostics.push_back("zero-area loop at segments " + std::to_string(c.seg_a) + "/" +
                                   std::to_string(c.seg_b) + " excluded");
      continue;
    }
    loop.orientation = loop.signed_area > 0.0 ? 1 : -1;
    report.loops.push_back(std::move(loop));
  }
  return report;
}

std::vector<YearInterval> anomaly_segments(const PhaseTrajectory& traj, const BackgroundFit& fit,
                                           double threshold) {
  if (traj.normalized())
    throw Error(ErrorKind::validation, kModule, "anomaly test needs prices in US$, not normalized");
  if (std::isnan(threshold) || threshold < 0.0)
    throw Error(ErrorKind::configuration, kModule, "threshold must be non-negative");
  std::vector<YearInterval> out;
  std::optional<YearInterval> open;
  for (const auto& p : traj.points()) {
    const bool above = p.y > (1.0 + threshold) * fit.background_price(p.year);
    if (above) {
      if (open) open->last = p.year;
      else open = YearInterval{p.year, p.year};
    } else if (open) {
      out.push_back(*open);
      open.reset();
    }
  }
  if (open) out.push_back(*open);
  return out;
}

LoopReport excursion_loops(const PhaseTrajectory& traj, const std::vector<YearInterval>& intervals) {
  const auto pts = traj.unit_scaled_xy();
  const auto last = static_cast<std::ptrdiff_t>(pts.size()) - 1;
  LoopReport report;
  for (const auto& iv : intervals) {
    const auto i0 = index_of(traj, iv.first);
    const auto i1 = index_of(traj, iv.last);
    if (i0 < 0 || i1 < 0 || i1 < i0)
      throw Error(ErrorKind::validation, kModule, "interval outside trajectory",
                  std::to_string(iv.first) + "-" + std::to_string(iv.last));
    const auto from = std::max<std::ptrdiff_t>(i0 - 1, 0);
    const auto to = std::min<std::ptrdiff_t>(i1 + 1, last);
    Loop loop;
    loop.anchor = LoopAnchor::excursion;
    loop.first_year = traj.points()[static_cast<std::size_t>(from)].year;
    loop.last_year = traj.points()[static_cast<std::size_t>(to)].year;
    for (auto i = from; i <= to; ++i) loop.vertex_chain.push_back(pts[static_cast<std::size_t>(i)]);
    loop.signed_area = loop.vertex_chain.size() >= 3 ? shoelace_area(loop.vertex_chain) : 0.0;
    if (loop.signed_area == 0.0) {
      report.diagnostics.push_back("zero-area excursion " + std::to_string(iv.first) + "-" +
                                   std::to_string(iv.last) + " excluded");
      continue;
    }
    loop.orientation = loop.signed_area > 0.0 ? 1 : -1;
    report.loops.push_back(std::move(loop));
  }
  return report;
}

}  // namespace phaseportrait
