#pragma once

#include "phaseportrait/data_model.hpp"

namespace phaseportrait {

struct AttractorReport {
  int first_year = 0;  ///< trailing window, inclusive
  int last_year = 0;
  double mean = 0.0;  ///< t/person
  double min = 0.0;
  double max = 0.0;
  double band_halfwidth = 0.0;
};

/// Statistics over the trailing `window` samples of a per-capita series.
AttractorReport attractor_statistics(const Series& per_capita_series, std::size_t window);

struct LinearTrend {
  double intercept = 0.0;
  double slope = 0.0;
  double at(double year) const { return intercept + slope * year; }
};

/// Least-squares line through the trailing `years` production samples.
LinearTrend production_trend(const Dataset& dataset, std::size_t years = 10);

struct ScenarioResult {
  double threshold_price = 0.0;  ///< US$(2014)/bbl
  double k = 0.0;
  double crossing_year = 0.0;
  long crossing_year_rounded = 0;
  double eroei_at_crossing = 0.0;
  double production_at_crossing = 0.0;  ///< Mton/yr, trailing linear trend
  int reference_year = 0;
  double years_from_reference = 0.0;
  bool already_crossed = false;
};

/// Solves k / E(t) = threshold on the linear EROEI model. The reference year
/// ("today") is the last dataset year.
ScenarioResult crossing_year(double k, const EroeiModel& model, double threshold, const Dataset& dataset);

/// k / E(t) for every year in [first_year, last_year].
Series background_price_path(double k, const EroeiModel& model, int first_year, int last_year);

}  // namespace phaseportrait
