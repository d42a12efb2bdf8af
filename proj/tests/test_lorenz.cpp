#include <doctest.h>

#include <cmath>

#include <Eigen/LU>

#include "phaseportrait/error.hpp"
#include "phaseportrait/lorenz.hpp"
#include "phaseportrait/lorenz_oil.hpp"
#include "test_support.hpp"

using namespace phaseportrait;
using doctest::Approx;
using P = LorenzParams<double>;
using S = LorenzState<double>;

namespace {

struct Sampled {
  Eigen::VectorXd x, y, z;
};

// Trajectory on [t0, t1] at spacing dt from (1, 1, 1).
Sampled sample(double dt, double t0, double t1) {
  const auto p = P::classical();
  const long steps = std::lround(t1 / dt);
  const long skip = std::lround(t0 / dt);
  auto traj = integrate(p, S(1, 1, 1), dt, steps);
  const auto n = traj.rows() - skip;
  return {traj.col(0).tail(n), traj.col(1).tail(n), traj.col(2).tail(n)};
}

double worst_relative_error(const LorenzFit<double>& f) {
  return std::max({std::abs(f.k1 - 10.0) / 10.0, std::abs(f.k2 - 28.0) / 28.0,
                   std::abs(f.k3 - 8.0 / 3.0) / (8.0 / 3.0)});
}

}  // namespace

TEST_CASE("right-hand side examples") {
  const auto p = P::classical();
  CHECK(lorenz_rhs(S(0, 0, 0), p).isZero());
  CHECK(lorenz_rhs(S(0, 0, 0), P{3.0, 0.2, 1.0}).isZero());
  const S d = lorenz_rhs(S(1, 1, 1), p);
  CHECK(d.x() == 0.0);
  CHECK(d.y() == 26.0);
  CHECK(d.z() == Approx(-5.0 / 3.0));
}

TEST_CASE("fixed points") {
  const auto p = P::classical();
  auto fp = fixed_points(p);
  REQUIRE(fp.size() == 3);
  const double c = std::sqrt(72.0);
  CHECK(fp[1].x() == Approx(c));
  CHECK(fp[1].x() == Approx(8.4853).epsilon(1e-4));
  CHECK(fp[1].y() == Approx(c));
  CHECK(fp[1].z() == 27.0);
  CHECK(fp[2].x() == Approx(-c));
  for (const auto& s : fp) CHECK(lorenz_rhs(s, p).norm() < 1e-12);
  CHECK(fixed_points(P{10.0, 0.5, 8.0 / 3.0}).size() == 1);
}

TEST_CASE("divergence") {
  CHECK(divergence(P::classical()) == Approx(-13.6667).epsilon(1e-5));
  CHECK(divergence(P{0.0, 28.0, 0.0}) == -1.0);
}

TEST_CASE("subcritical decay to the origin") {
  auto traj = integrate(P{10.0, 0.5, 8.0 / 3.0}, S(1, 1, 1), 0.01, 5000);
  CHECK(traj.row(traj.rows() - 1).norm() < 1e-6);
}

TEST_CASE("classical attractor stays bounded") {
  auto traj = integrate(P::classical(), S(1, 1, 1), 0.001, 100000);
  CHECK(traj.rowwise().norm().maxCoeff() < 100.0);
}

TEST_CASE("integration errors") {
  CHECK_THROWS_AS(integrate(P::classical(), S(1, 1, 1), 0.01, 0), Error);
  CHECK_THROWS_AS(integrate(P::classical(), S(1, 1, 1), 0.0, 10), Error);
  try {
    integrate(P::classical(), S(1e200, 1e200, 1e200), 0.01, 100);
    FAIL("expected a numerical error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::numerical);
    CHECK(e.location().find("step ") == 0);
  }
}

TEST_CASE("RK4 convergence order") {
  const auto p = P::classical();
  const S s0(1, 1, 1);
  auto endpoint = [&](double dt) {
    auto t = integrate(p, s0, dt, std::lround(1.0 / dt));
    return S(t.row(t.rows() - 1).transpose());
  };
  // Coarser steps on this interval are pre-asymptotic (ratio near 40).
  const double dt = 0.005;
  const S ref = endpoint(dt / 8.0);
  const double e1 = (endpoint(dt) - ref).norm();
  const double e2 = (endpoint(dt / 2.0) - ref).norm();
  const double ratio = e1 / e2;
  INFO("ratio " << ratio);
  CHECK(ratio >= 8.0);
  CHECK(ratio <= 32.0);
}

TEST_CASE("volume contraction follows the divergence") {
  // A small tetrahedron of nearby states shrinks like exp(div * t).
  const auto p = P::classical();
  const double h = 1e-7, t = 0.2, dt = 1e-4;
  const S base(1, 1, 20);
  auto advance = [&](const S& s) {
    auto traj = integrate(p, s, dt, std::lround(t / dt));
    return S(traj.row(traj.rows() - 1).transpose());
  };
  const S b = advance(base);
  Eigen::Matrix3d m;
  m.col(0) = advance(base + S(h, 0, 0)) - b;
  m.col(1) = advance(base + S(0, h, 0)) - b;
  m.col(2) = advance(base + S(0, 0, h)) - b;
  const double ratio = m.determinant() / (h * h * h);
  CHECK(ratio == Approx(std::exp(divergence(p) * t)).epsilon(0.02));
}

TEST_CASE("finite-difference derivatives") {
  Eigen::VectorXd sq(4);
  sq << 0, 1, 4, 9;
  auto d = estimate_derivatives(sq, 1.0);
  CHECK(d(1) == 2.0);
  CHECK(d(2) == 4.0);

  CHECK(estimate_derivatives(Eigen::VectorXd::Constant(5, 3.0), 0.1).isZero());

  Eigen::VectorXd lin = Eigen::VectorXd::LinSpaced(6, 1.0, 3.5);  // slope 0.5 per sample
  auto dl = estimate_derivatives(lin, 0.25);
  for (Eigen::Index i = 0; i < dl.size(); ++i) CHECK(dl(i) == Approx(2.0));

  // Quadratic 3 t^2 - 2 t + 1 at t = 0.1 i, interior exact.
  Eigen::VectorXd q(8);
  for (int i = 0; i < 8; ++i) {
    const double t = 0.1 * i;
    q(i) = 3 * t * t - 2 * t + 1;
  }
  auto dq = estimate_derivatives(q, 0.1);
  for (int i = 0; i < 8; ++i) CHECK(dq(i) == Approx(6 * 0.1 * i - 2).epsilon(1e-10));

  CHECK_THROWS_AS(estimate_derivatives(Eigen::VectorXd::Ones(2), 1.0), Error);
}

TEST_CASE("fit recovers the generating parameters") {
  auto s = sample(0.005, 5.0, 25.0);
  auto fit = fit_lorenz<double>(s.x, s.y, s.z, 0.005);
  CHECK(fit.k1 == Approx(10.0).epsilon(0.05));
  CHECK(fit.k2 == Approx(28.0).epsilon(0.05));
  CHECK(fit.k3 == Approx(8.0 / 3.0).epsilon(0.05));
  CHECK(fit.n_points == s.x.size());
  CHECK(fit.se1 > 0.0);
}

TEST_CASE("fit improves as dt shrinks") {
  auto coarse = sample(0.02, 5.0, 25.0);
  auto fine = sample(0.002, 5.0, 25.0);
  const double ec = worst_relative_error(fit_lorenz<double>(coarse.x, coarse.y, coarse.z, 0.02));
  const double ef = worst_relative_error(fit_lorenz<double>(fine.x, fine.y, fine.z, 0.002));
  CHECK(ef < ec);
}

TEST_CASE("fit errors") {
  Eigen::VectorXd c = Eigen::VectorXd::Constant(10, 2.0);
  try {
    fit_lorenz<double>(c, c, c, 1.0);
    FAIL("expected zero-variance error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("X equation") != std::string::npos);
  }
  Eigen::VectorXd a = Eigen::VectorXd::LinSpaced(10, 1.0, 2.0);
  CHECK_THROWS_AS(fit_lorenz<double>(a, a.head(9), a, 1.0), Error);
  CHECK_THROWS_AS(fit_lorenz<double>(a, a, a, 1.0, Eigen::Index{10}), Error);
}

TEST_CASE("works in single precision") {
  auto traj = integrate(LorenzParams<float>::classical(), LorenzState<float>(1, 1, 1), 0.01f, 100);
  CHECK(traj.allFinite());
}

TEST_CASE("product statistics") {
  const auto p = P::classical();
  const S cp = fixed_points(p)[1];
  LorenzTrajectory<double> at_c(5, 3);
  at_c.rowwise() = cp.transpose();
  auto st = product_statistics(at_c);
  const double expected = std::sqrt(p.b * (p.r - 1.0)) * (p.r - 1.0);
  CHECK(st.mean == Approx(expected));
  CHECK(st.mean == Approx(229.10).epsilon(1e-4));
  REQUIRE(st.cv);
  CHECK(*st.cv == Approx(0.0));

  LorenzTrajectory<double> origin = LorenzTrajectory<double>::Zero(5, 3);
  auto so = product_statistics(origin);
  CHECK(so.mean == 0.0);
  CHECK_FALSE(so.cv.has_value());
}

TEST_CASE("oil data fit, central reference") {
  auto ds = load_dataset(testing::bundled("oil_production_price.csv"), {});
  CHECK(default_reference_index(ds) == 25);
  auto fit = fit_lorenz_oil(ds, EroeiModel::default_for(ds));
  CHECK(std::abs(fit.k1) <= 0.1);
  CHECK(fit.k2 > 0.5);
  CHECK(fit.k2 < 3.0);
  CHECK(fit.k3 > 0.1);
  CHECK(fit.k3 < 1.0);
  CHECK(fit.n_points == 50);
}
