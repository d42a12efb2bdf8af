#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "phaseportrait/error.hpp"

namespace phaseportrait {

/// Lorenz-63 parameters: sigma (Prandtl), r (relative Rayleigh), b (geometric).
template <typename Scalar>
struct LorenzParams {
  Scalar sigma{10};
  Scalar r{28};
  Scalar b{Scalar(8) / Scalar(3)};

  static LorenzParams classical() { return {Scalar(10), Scalar(28), Scalar(8) / Scalar(3)}; }
};

/// x ~ convective intensity (oil production), y ~ temperature difference
/// (EROEI), z ~ deviation from a linear profile (oil price).
template <typename Scalar>
using LorenzState = Eigen::Matrix<Scalar, 3, 1>;

/// Rows are states at t0, t0 + dt, ...
template <typename Scalar>
using LorenzTrajectory = Eigen::Matrix<Scalar, Eigen::Dynamic, 3>;

template <typename Scalar>
LorenzState<Scalar> lorenz_rhs(const LorenzState<Scalar>& s, const LorenzParams<Scalar>& p) {
  return {p.sigma * (s.y() - s.x()),
          s.x() * (p.r - s.z()) - s.y(),
          s.x() * s.y() - p.b * s.z()};
}

/// Trace of the Jacobian, constant over phase space.
template <typename Scalar>
Scalar divergence(const LorenzParams<Scalar>& p) {
  return -(p.sigma + Scalar(1) + p.b);
}

/// Origin, and C+/C- when r > 1.
template <typename Scalar>
std::vector<LorenzState<Scalar>> fixed_points(const LorenzParams<Scalar>& p) {
  std::vector<LorenzState<Scalar>> out{LorenzState<Scalar>::Zero()};
  if (p.r > Scalar(1)) {
    using std::sqrt;
    const Scalar c = sqrt(p.b * (p.r - Scalar(1)));
    out.push_back({c, c, p.r - Scalar(1)});
    out.push_back({-c, -c, p.r - Scalar(1)});
  }
  return out;
}

template <typename Scalar>
LorenzState<Scalar> rk4_step(const LorenzState<Scalar>& s, const LorenzParams<Scalar>& p, Scalar dt) {
  const Scalar half = dt / Scalar(2);
  const LorenzState<Scalar> k1 = lorenz_rhs(s, p);
  const LorenzState<Scalar> k2 = lorenz_rhs<Scalar>(s + half * k1, p);
  const LorenzState<Scalar> k3 = lorenz_rhs<Scalar>(s + half * k2, p);
  const LorenzState<Scalar> k4 = lorenz_rhs<Scalar>(s + dt * k3, p);
  return s + (dt / Scalar(6)) * (k1 + Scalar(2) * k2 + Scalar(2) * k3 + k4);
}

/// Classical fourth-order Runge-Kutta; returns n_steps + 1 states.
template <typename Scalar>
LorenzTrajectory<Scalar> integrate(const LorenzParams<Scalar>& p, const LorenzState<Scalar>& initial,
                                   Scalar dt, long n_steps) {
  if (!(dt > Scalar(0)))
    throw Error(ErrorKind::configuration, "lorenz-lab", "dt must be positive");
  if (n_steps < 1)
    throw Error(ErrorKind::configuration, "lorenz-lab", "n_steps must be at least 1");
  LorenzTrajectory<Scalar> out(n_steps + 1, 3);
  LorenzState<Scalar> s = initial;
  out.row(0) = s.transpose();
  for (long i = 1; i <= n_steps; ++i) {
    s = rk4_step(s, p, dt);
    if (!s.allFinite())
      throw Error(ErrorKind::numerical, "lorenz-lab", "state became non-finite",
                  "step " + std::to_string(i));
    out.row(i) = s.transpose();
  }
  return out;
}

/// Central differences inside, second-order one-sided differences at both
/// ends. Exact on quadratics at interior points and on linear data everywhere.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> estimate_derivatives(
    const Eigen::MatrixBase<Derived>& s, typename Derived::Scalar dt) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = s.size();
  if (n < 3)
    throw Error(ErrorKind::validation, "lorenz-lab", "derivative estimate needs at least 3 samples");
  if (!(dt > Scalar(0)))
    throw Error(ErrorKind::configuration, "lorenz-lab", "dt must be positive");
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> d(n);
  const Scalar two_dt = Scalar(2) * dt;
  d(0) = (Scalar(-3) * s(0) + Scalar(4) * s(1) - s(2)) / two_dt;
  for (Eigen::Index i = 1; i + 1 < n; ++i) d(i) = (s(i + 1) - s(i - 1)) / two_dt;
  d(n - 1) = (Scalar(3) * s(n - 1) - Scalar(4) * s(n - 2) + s(n - 3)) / two_dt;
  return d;
}

template <typename Scalar>
struct LorenzFit {
  Scalar k1{}, k2{}, k3{};  ///< estimates of sigma, r, b
  Scalar se1{}, se2{}, se3{};
  long n_points = 0;
};

namespace detail {

template <typename Scalar>
std::pair<Scalar, Scalar> ols_through_origin(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& target,
                                             const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& regressor,
                                             const char* equation) {
  const Scalar sxx = regressor.squaredNorm();
  const Eigen::Index n = regressor.size();
  const Scalar mean = regressor.mean();
  const Scalar spread = (regressor.array() - mean).square().sum();
  if (!(sxx > Scalar(0)) || !(spread > Scalar(0)))
    throw Error(ErrorKind::numerical, "lorenz-lab",
                std::string("zero-variance regressor in ") + equation + " equation", equation);
  const Scalar coef = regressor.dot(target) / sxx;
  const Scalar rss = (target - coef * regressor).squaredNorm();
  using std::sqrt;
  return {coef, sqrt(rss / Scalar(n - 1) / sxx)};
}

}  // namespace detail

/// Per-equation least squares on finite-difference derivatives:
///   dX/dt            = K1 (Y - X)
///   dY/dt + Y + X Z  = K2 X
///   X Y - dZ/dt      = K3 Z
/// With `reference`, every series is first divided by its value at that
/// sample index.
template <typename Scalar>
LorenzFit<Scalar> fit_lorenz(Eigen::Matrix<Scalar, Eigen::Dynamic, 1> xs,
                             Eigen::Matrix<Scalar, Eigen::Dynamic, 1> ys,
                             Eigen::Matrix<Scalar, Eigen::Dynamic, 1> zs, Scalar dt,
                             std::optional<Eigen::Index> reference = std::nullopt) {
  const Eigen::Index n = xs.size();
  if (ys.size() != n || zs.size() != n)
    throw Error(ErrorKind::validation, "lorenz-lab", "series lengths differ");
  if (n < 4) throw Error(ErrorKind::validation, "lorenz-lab", "fit needs at least 4 samples");
  if (reference) {
    const Eigen::Index ref = *reference;
    if (ref < 0 || ref >= n)
      throw Error(ErrorKind::validation, "lorenz-lab", "reference index out of range",
                  std::to_string(ref));
    if (xs(ref) == Scalar(0) || ys(ref) == Scalar(0) || zs(ref) == Scalar(0))
      throw Error(ErrorKind::numerical, "lorenz-lab", "zero reference value", std::to_string(ref));
    xs /= xs(ref);
    ys /= ys(ref);
    zs /= zs(ref);
  }
  const auto dx = estimate_derivatives(xs, dt);
  const auto dy = estimate_derivatives(ys, dt);
  const auto dz = estimate_derivatives(zs, dt);
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Vec xz = xs.cwiseProduct(zs);
  const Vec xy = xs.cwiseProduct(ys);

  LorenzFit<Scalar> fit;
  fit.n_points = static_cast<long>(n);
  std::tie(fit.k1, fit.se1) = detail::ols_through_origin<Scalar>(dx, ys - xs, "X");
  std::tie(fit.k2, fit.se2) = detail::ols_through_origin<Scalar>(dy + ys + xz, xs, "Y");
  std::tie(fit.k3, fit.se3) = detail::ols_through_origin<Scalar>(xy - dz, zs, "Z");
  return fit;
}

template <typename Scalar>
struct ProductStatistics {
  Scalar mean{};
  std::optional<Scalar> cv;  ///< empty when the mean is zero
};

/// Mean and coefficient of variation of the pointwise product y*z.
template <typename Scalar>
ProductStatistics<Scalar> product_statistics(const LorenzTrajectory<Scalar>& traj) {
  if (traj.rows() == 0)
    throw Error(ErrorKind::validation, "lorenz-lab", "empty trajectory");
  const Eigen::Array<Scalar, Eigen::Dynamic, 1> yz = traj.col(1).array() * traj.col(2).array();
  ProductStatistics<Scalar> out;
  out.mean = yz.mean();
  if (out.mean != Scalar(0)) {
    using std::abs;
    using std::sqrt;
    out.cv = sqrt((yz - out.mean).square().mean()) / abs(out.mean);
  }
  return out;
}

}  // namespace phaseportrait
