#include "phaseportrait/envelope_fit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "phaseportrait/error.hpp"

namespace phaseportrait {

namespace {

constexpr const char* kModule = "envelope-fit";

const AnnualRecord& record_for(const Dataset& dataset, int year) {
  const auto* r = dataset.find(year);
  if (!r)
    throw Error(ErrorKind::validation, kModule, "year " + std::to_string(year) + " not in dataset",
                std::to_string(year));
  return *r;
}

}  // namespace

double eroei_for(const EroeiSource& source, int year) {
  double e = std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, EroeiModel>) {
          return eroei_at(s, year).value;
        } else {
          auto it = std::find_if(s.begin(), s.end(), [&](const YearValue& yv) { return yv.year == year; });
          if (it == s.end())
            throw Error(ErrorKind::validation, kModule, "no EROEI value for year " + std::to_string(year),
                        std::to_string(year));
          return it->value;
        }
      },
      source);
  if (!(e > 0.0))
    throw Error(ErrorKind::numerical, kModule, "EROEI must be positive", std::to_string(year));
  return e;
}

double coefficient_of_variation(const Eigen::Ref<const Eigen::VectorXd>& values) {
  if (values.size() == 0) return std::nan("");
  const double mean = values.mean();
  const double var = (values.array() - mean).square().mean();
  return std::sqrt(var) / std::abs(mean);
}

std::vector<int> select_support(const Dataset& dataset, const SupportMode& mode) {
  if (const auto* explicit_years = std::get_if<std::vector<int>>(&mode)) {
    for (int y : *explicit_years) record_for(dataset, y);
    return *explicit_years;
  }

  const auto& recs = dataset.records();
  std::vector<std::size_t> order(recs.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (recs[a].production != recs[b].production) return recs[a].production < recs[b].production;
    return recs[a].price < recs[b].price;
  });

  // Andrew's monotone chain, lower half only; collinear interior points drop.
  auto turn = [&](std::size_t o, std::size_t a, std::size_t b) {
    return (recs[a].production - recs[o].production) * (recs[b].price - recs[o].price) -
           (recs[a].price - recs[o].price) * (recs[b].production - recs[o].production);
  };
  std::vector<std::size_t> hull;
  for (std::size_t i : order) {
    while (hull.size() >= 2 && turn(hull[hull.size() - 2], hull.back(), i) <= 0.0) hull.pop_back();
    hull.push_back(i);
  }

  auto cheapest = std::min_element(recs.begin(), recs.end(), [](const auto& a, const auto& b) {
                    return a.price < b.price;
                  }) - recs.begin();
  if (std::find(hull.begin(), hull.end(), static_cast<std::size_t>(cheapest)) == hull.end()) {
    auto pos = std::find_if(hull.begin(), hull.end(), [&](std::size_t h) {
      return recs[h].production > recs[static_cast<std::size_t>(cheapest)].production;
    });
    hull.insert(pos, static_cast<std::size_t>(cheapest));
  }

  std::vector<int> years;
  years.reserve(hull.size());
  for (std::size_t h : hull) years.push_back(recs[h].year);
  return years;
}

double fit_limit_price(const Eigen::Ref<const Eigen::VectorXd>& price,
                       const Eigen::Ref<const Eigen::VectorXd>& eroei) {
  const Eigen::ArrayXd inv = eroei.array().inverse();
  return (price.array() * inv).sum() / inv.square().sum();
}

BackgroundFit fit_background(const Dataset& dataset, const EroeiSource& eroei,
                             const std::vector<int>& support, const BootstrapOptions& bootstrap) {
  if (support.size() < 3)
    throw Error(ErrorKind::validation, kModule,
                "background fit needs at least 3 support points, got " + std::to_string(support.size()));
  const auto n = static_cast<Eigen::Index>(support.size());
  Eigen::VectorXd price(n), e(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int year = support[static_cast<std::size_t>(i)];
    price(i) = record_for(dataset, year).price;
    e(i) = eroei_for(eroei, year);
  }

  BackgroundFit fit;
  fit.eroei = eroei;
  fit.k = fit_limit_price(price, e);
  fit.support_years = support;
  const Eigen::VectorXd fitted = fit.k * e.cwiseInverse();
  const Eigen::VectorXd resid = price - fitted;
  fit.residuals.assign(resid.data(), resid.data() + n);
  fit.rms_relative_residual = std::sqrt(resid.cwiseQuotient(fitted).squaredNorm() / static_cast<double>(n));
  fit.in_reference_band = fit.k >= kReferenceBandLow && fit.k <= kReferenceBandHigh;

  fit.bootstrap_draws = bootstrap.draws;
  fit.bootstrap_seed = bootstrap.seed;
  if (bootstrap.draws > 1) {
    std::mt19937_64 rng(bootstrap.seed);
    std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
    Eigen::VectorXd ks(bootstrap.draws);
    Eigen::VectorXd resampled(n);
    for (int d = 0; d < bootstrap.draws; ++d) {
      for (Eigen::Index i = 0; i < n; ++i) resampled(i) = fitted(i) + resid(pick(rng));
      ks(d) = fit_limit_price(resampled, e);
    }
    const double mean = ks.mean();
    fit.k_std_error = std::sqrt((ks.array() - mean).square().sum() / (bootstrap.draws - 1));
  }
  return fit;
}

std::vector<CurveSample> limit_price_curve(double k, double e_min, double e_max, double step) {
  if (!(k > 0.0)) throw Error(ErrorKind::configuration, kModule, "k must be positive");
  if (!(e_min > 0.0) || !(e_max >= e_min) || !std::isfinite(e_max))
    throw Error(ErrorKind::configuration, kModule, "EROEI range must lie in (0, inf)");
  if (!(step > 0.0)) throw Error(ErrorKind::configuration, kModule, "step must be positive");
  const auto count = static_cast<std::size_t>(std::floor((e_max - e_min) / step + 1e-9)) + 1;
  std::vector<CurveSample> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double e = e_min + static_cast<double>(i) * step;
    out.push_back({e, k / e});
  }
  return out;
}

ProductInvariance product_invariance(const Dataset& dataset, const EroeiSource& eroei,
                                     const std::vector<int>& support) {
  const auto n = static_cast<Eigen::Index>(support.size());
  Eigen::VectorXd price(n), product(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int year = support[static_cast<std::size_t>(i)];
    price(i) = record_for(dataset, year).price;
    product(i) = price(i) * eroei_for(eroei, year);
  }
  ProductInvariance out;
  out.cv_product = coefficient_of_variation(product);
  out.cv_price = coefficient_of_variation(price);
  out.product_more_stable = out.cv_product < out.cv_price;
  return out;
}

std::vector<int> envelope_violations(const Dataset& dataset, const BackgroundFit& fit, double tolerance) {
  std::vector<int> out;
  for (const auto& r : dataset.records()) {
    if (std::find(fit.support_years.begin(), fit.support_years.end(), r.year) != fit.support_years.end())
      continue;
    const double bg = fit.background_price(r.year);
    if (r.price < bg - tolerance * bg) out.push_back(r.year);
  }
  return out;
}

}  // namespace phaseportrait
