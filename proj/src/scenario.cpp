#include "phaseportrait/scenario.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "phaseportrait/error.hpp"

namespace phaseportrait {

namespace {
constexpr const char* kModule = "scenario";
}

AttractorReport attractor_statistics(const Series& series, std::size_t window) {
  if (window == 0) throw Error(ErrorKind::validation, kModule, "empty attractor window");
  if (window > series.size())
    throw Error(ErrorKind::validation, kModule,
                "window of " + std::to_string(window) + " exceeds series length " +
                    std::to_string(series.size()));
  const auto begin = series.end() - static_cast<std::ptrdiff_t>(window);
  AttractorReport r;
  r.first_year = begin->year;
  r.last_year = series.back().year;
  r.min = begin->value;
  r.max = begin->value;
  double sum = 0.0;
  for (auto it = begin; it != series.end(); ++it) {
    sum += it->value;
    r.min = std::min(r.min, it->value);
    r.max = std::max(r.max, it->value);
  }
  r.mean = sum / static_cast<double>(window);
  r.band_halfwidth = 0.5 * (r.max - r.min);
  return r;
}

LinearTrend production_trend(const Dataset& dataset, std::size_t years) {
  if (years < 2 || years > dataset.size())
    throw Error(ErrorKind::validation, kModule, "trend window must be within [2, dataset size]");
  const auto n = static_cast<Eigen::Index>(years);
  const auto& recs = dataset.records();
  Eigen::MatrixXd design(n, 2);
  Eigen::VectorXd target(n);
  // Centered on the last year to keep the normal equations well conditioned.
  const double origin = recs.back().year;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = recs[recs.size() - years + static_cast<std::size_t>(i)];
    design(i, 0) = 1.0;
    design(i, 1) = r.year - origin;
    target(i) = r.production;
  }
  const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(target);
  return {coef(0) - coef(1) * origin, coef(1)};
}

ScenarioResult crossing_year(double k, const EroeiModel& model, double threshold, const Dataset& dataset) {
  if (!(k > 0.0)) throw Error(ErrorKind::configuration, kModule, "k must be positive");
  if (!(threshold > 0.0)) throw Error(ErrorKind::configuration, kModule, "threshold must be positive");
  if (!(model.e_end() < model.e_start()))
    throw Error(ErrorKind::configuration, kModule, "EROEI model must be decreasing");

  ScenarioResult out;
  out.threshold_price = threshold;
  out.k = k;
  out.eroei_at_crossing = k / threshold;
  out.crossing_year = model.year_start() + (out.eroei_at_crossing - model.e_start()) / model.slope();
  out.crossing_year_rounded = std::lround(out.crossing_year);
  out.reference_year = dataset.last_year();
  out.years_from_reference = out.crossing_year - out.reference_year;
  out.already_crossed = out.crossing_year < out.reference_year;
  out.production_at_crossing = production_trend(dataset).at(out.crossing_year);
  return out;
}

Series background_price_path(double k, const EroeiModel& model, int first_year, int last_year) {
  if (last_year < first_year) throw Error(ErrorKind::configuration, kModule, "empty year interval");
  Series out;
  out.reserve(static_cast<std::size_t>(last_year - first_year + 1));
  for (int y = first_year; y <= last_year; ++y) {
    const double e = eroei_at(model, y).value;
    if (!(e > 0.0))
      throw Error(ErrorKind::numerical, kModule, "EROEI not positive in year " + std::to_string(y),
                  std::to_string(y));
    out.push_back({y, k / e});
  }
  return out;
}

}  // namespace phaseportrait
