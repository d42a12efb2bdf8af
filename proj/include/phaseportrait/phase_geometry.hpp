#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "phaseportrait/data_model.hpp"

namespace phaseportrait {

struct BackgroundFit;

struct PhasePoint {
  int year = 0;
  double x = 0.0;  ///< production (Mton, t/person, or dimensionless)
  double y = 0.0;  ///< price (2014 US$/bbl or dimensionless)
  std::optional<double> z;  ///< EROEI
};

class PhaseTrajectory {
 public:
  explicit PhaseTrajectory(std::vector<PhasePoint> points, bool normalized = false);

  const std::vector<PhasePoint>& points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  int dimensionality() const noexcept { return dimensionality_; }
  bool normalized() const noexcept { return normalized_; }

  /// (x, y) with each axis mapped onto [0, 1] over its data range.
  std::vector<Eigen::Vector2d> unit_scaled_xy() const;

 private:
  std::vector<PhasePoint> points_;
  int dimensionality_ = 2;
  bool normalized_ = false;
};

enum class XAxis { production, per_capita_production };
enum class ZAxis { none, eroei_model, eroei_per_year };

struct AxisSpec {
  XAxis x = XAxis::production;
  ZAxis z = ZAxis::none;
  std::optional<EroeiModel> model;  ///< used when z == eroei_model; default model otherwise
  std::optional<int> normalize_year;
};

PhaseTrajectory build_trajectory(const Dataset& dataset, const AxisSpec& axes);

inline constexpr double kIntersectionTolerance = 1e-9;

struct Crossing {
  std::size_t seg_a = 0;
  std::size_t seg_b = 0;
  Eigen::Vector2d location = Eigen::Vector2d::Zero();  ///< trajectory coordinates
  double param_a = 0.0;
  double param_b = 0.0;
};

/// Collinear overlap between two non-adjacent segments; not a transversal
/// crossing.
struct DegenerateOverlap {
  std::size_t seg_a = 0;
  std::size_t seg_b = 0;
};

struct CrossingReport {
  std::vector<Crossing> crossings;
  std::vector<DegenerateOverlap> overlaps;
};

CrossingReport find_crossings(const PhaseTrajectory& traj);

enum class LoopAnchor { crossing, excursion };

struct Loop {
  LoopAnchor anchor = LoopAnchor::crossing;
  std::optional<Crossing> start_crossing;
  int first_year = 0;  ///< years of the first and last trajectory vertex in the chain
  int last_year = 0;
  std::vector<Eigen::Vector2d> vertex_chain;  ///< unit-scaled coordinates
  double signed_area = 0.0;
  int orientation = 0;  ///< +1 counterclockwise, -1 clockwise
};

struct LoopReport {
  std::vector<Loop> loops;
  std::vector<std::string> diagnostics;
};

/// One closed polygon per crossing: intersection point, the vertices visited
/// between the two passes, back to the intersection point.
LoopReport extract_loops(const PhaseTrajectory& traj, const std::vector<Crossing>& crossings);

/// Signed polygon area (shoelace), positive for counterclockwise.
double shoelace_area(const std::vector<Eigen::Vector2d>& polygon);

struct YearInterval {
  int first = 0;
  int last = 0;
  bool contains(int year) const { return first <= year && year <= last; }
};

/// Maximal runs of years where price > (1 + threshold) * k / E(year).
std::vector<YearInterval> anomaly_segments(const PhaseTrajectory& traj, const BackgroundFit& fit,
                                           double threshold = 0.5);

/// Closed polygon per anomaly interval: from the last year before departure
/// through the excursion to the first year after return (or the final
/// sample), closed by a chord. The orientation of each is the rotation
/// direction of that crisis.
LoopReport excursion_loops(const PhaseTrajectory& traj, const std::vector<YearInterval>& intervals);

}  // namespace phaseportrait
