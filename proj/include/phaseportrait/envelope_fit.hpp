#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "phaseportrait/data_model.hpp"

namespace phaseportrait {

/// Where EROEI values come from: the linear model, or a per-year column.
using EroeiSource = std::variant<Series, EroeiModel>;

/// EROEI for a dataset year. Throws when the per-year series lacks the year
/// or the value is not positive.
double eroei_for(const EroeiSource& source, int year);

struct AutoSupport {};
using SupportMode = std::variant<AutoSupport, std::vector<int>>;

/// Lower-envelope years of the (production, price) scatter, or a validated
/// explicit list. Auto mode returns lower convex hull vertices in increasing
/// production order.
std::vector<int> select_support(const Dataset& dataset, const SupportMode& mode);

struct BootstrapOptions {
  int draws = 1000;
  std::uint64_t seed = 20160101;
};

/// Lower bound and upper bound of the limit-price band quoted for the oil data.
inline constexpr double kReferenceBandLow = 100.0;
inline constexpr double kReferenceBandHigh = 750.0;

/// Background curve P = k / E fitted to support points.
struct BackgroundFit {
  double k = 0.0;            ///< limit price at EROEI = 1, US$(2014)/bbl
  double k_std_error = 0.0;  ///< residual bootstrap
  int bootstrap_draws = 0;
  std::uint64_t bootstrap_seed = 0;
  std::vector<int> support_years;
  std::vector<double> residuals;  ///< observed - fitted, per support year
  double rms_relative_residual = 0.0;
  bool in_reference_band = false;
  EroeiSource eroei;

  double background_price(int year) const { return k / eroei_for(eroei, year); }
};

/// Closed-form least squares k = sum(P/E) / sum(1/E^2) over the support.
BackgroundFit fit_background(const Dataset& dataset, const EroeiSource& eroei,
                             const std::vector<int>& support,
                             const BootstrapOptions& bootstrap = {});

/// k for given prices and EROEI values, no bookkeeping.
double fit_limit_price(const Eigen::Ref<const Eigen::VectorXd>& price,
                       const Eigen::Ref<const Eigen::VectorXd>& eroei);

struct CurveSample {
  double eroei = 0.0;
  double price = 0.0;
};

/// Samples P = k / E on [e_min, e_max] with the given step (both ends
/// included when the range is a whole number of steps).
std::vector<CurveSample> limit_price_curve(double k, double e_min, double e_max, double step = 0.5);

struct ProductInvariance {
  double cv_product = 0.0;  ///< coefficient of variation of P*E
  double cv_price = 0.0;
  bool product_more_stable = false;  ///< cv_product < cv_price
};

ProductInvariance product_invariance(const Dataset& dataset, const EroeiSource& eroei,
                                     const std::vector<int>& support);

/// Non-support years whose price sits more than `tolerance` (relative to the
/// background) below the fitted background.
std::vector<int> envelope_violations(const Dataset& dataset, const BackgroundFit& fit,
                                     double tolerance = 0.05);

/// Population coefficient of variation std/|mean|.
double coefficient_of_variation(const Eigen::Ref<const Eigen::VectorXd>& values);

}  // namespace phaseportrait
