#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace phaseportrait {

enum class PlotKind { phase2d, phase3d_projection, per_capita, lorenz, background_overlay };

std::string_view to_string(PlotKind kind);

enum class SeriesStyle {
  timeline,  ///< polyline through markers, optionally labelled by year
  curve,     ///< polyline only
  markers,
};

struct PlotSeries {
  std::string name;
  std::string source_op;  ///< operation that produced the data, recorded in metadata
  SeriesStyle style = SeriesStyle::timeline;
  std::string color = "#c0392b";
  std::vector<Eigen::Vector2d> points;
  std::vector<double> z;  ///< third coordinate, phase3d_projection only
  std::vector<int> labels;  ///< per-point year labels, optional
};

struct GuideLine {
  double y = 0.0;
  std::string label;
};

struct PlotSpec {
  PlotKind kind = PlotKind::phase2d;
  std::string title;
  std::string x_label;  ///< with units
  std::string y_label;
  std::string z_label;  ///< second panel abscissa for phase3d_projection
  bool label_points = true;
  std::vector<GuideLine> guides;
  /// Clip the drawing area to this y range (curves overlays can run off to
  /// very large values near E -> 0).
  std::optional<std::pair<double, double>> y_range;
};

/// Deterministic SVG document. 3D data are drawn as two panels: (x, y) and
/// the view along the x axis, (z, y).
std::string render_plot(const PlotSpec& spec, const std::vector<PlotSeries>& data);

}  // namespace phaseportrait
