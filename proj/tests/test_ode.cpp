// Integrator checks against problems with closed-form solutions.

#include <cmath>

#include <Eigen/Core>

#include "doctest.h"
#include "siv/ode.hpp"
#include "test_util.hpp"

using Eigen::Vector2d;
using Vec1 = Eigen::Matrix<double, 1, 1>;
using namespace siv;

namespace {

Vec1 scalar(double x) {
  Vec1 v;
  v[0] = x;
  return v;
}

}  // namespace

TEST_CASE("exponential decay hits the closed form, including dense output") {
  auto rhs = [](double, const Vec1& y) { return scalar(-y[0]); };
  ode::Options opt;
  opt.rtol = opt.atol = 1e-12;
  const auto sol = ode::integrate(rhs, 0.0, scalar(1.0), 5.0, opt);
  CHECK(sol.y_back()[0] == doctest::Approx(std::exp(-5.0)).epsilon(1e-11));

  testutil::Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const double t = rng.uniform(0.0, 5.0);
    CHECK(sol(t)[0] == doctest::Approx(std::exp(-t)).epsilon(1e-10));
  }
}

TEST_CASE("backward integration") {
  auto rhs = [](double, const Vec1& y) { return y; };
  const auto sol = ode::integrate(rhs, 1.0, scalar(1.0), 0.0);
  CHECK(sol.y_back()[0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-9));
  CHECK(sol(0.25)[0] == doctest::Approx(std::exp(-0.75)).epsilon(1e-9));
}

TEST_CASE("harmonic oscillator keeps its energy over 50 periods") {
  auto rhs = [](double, const Vector2d& y) { return Vector2d{y[1], -y[0]}; };
  ode::Options opt;
  opt.rtol = opt.atol = 1e-12;
  const double t_end = 50.0 * 2.0 * M_PI;
  const auto sol = ode::integrate(rhs, 0.0, Vector2d{1.0, 0.0}, t_end, opt);

  const Vector2d y = sol.y_back();
  CHECK(0.5 * (y[0] * y[0] + y[1] * y[1]) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(y[0] == doctest::Approx(1.0).epsilon(1e-8));

  testutil::Rng rng(12);
  for (int i = 0; i < 100; ++i) {
    const double t = rng.uniform(0.0, t_end);
    CHECK(sol(t)[0] == doctest::Approx(std::cos(t)).epsilon(2e-8));
  }
}

TEST_CASE("tighter tolerances give smaller errors") {
  auto rhs = [](double t, const Vec1& y) { return scalar(std::cos(t) * y[0]); };
  auto err_at = [&](double tol) {
    ode::Options opt;
    opt.rtol = opt.atol = tol;
    const auto sol = ode::integrate(rhs, 0.0, scalar(1.0), 10.0, opt);
    return std::abs(sol.y_back()[0] - std::exp(std::sin(10.0)));
  };
  const double loose = err_at(1e-6);
  const double tight = err_at(1e-12);
  CHECK(tight < loose);
  CHECK(tight < 1e-10);
}

TEST_CASE("max_steps exhaustion raises tolerance_error") {
  auto rhs = [](double, const Vec1& y) { return scalar(-y[0]); };
  ode::Options opt;
  opt.max_steps = 3;
  opt.max_step = 1e-4;
  CHECK_THROWS_AS(ode::integrate(rhs, 0.0, scalar(1.0), 10.0, opt), tolerance_error);
}

TEST_CASE("empty span and bad tolerances are domain errors") {
  auto rhs = [](double, const Vec1& y) { return y; };
  CHECK_THROWS_AS(ode::integrate(rhs, 1.0, scalar(1.0), 1.0), domain_error);
  ode::Options opt;
  opt.rtol = 0.0;
  CHECK_THROWS_AS(ode::integrate(rhs, 0.0, scalar(1.0), 1.0, opt), domain_error);
}

TEST_CASE("stop predicate halts the integration early") {
  auto rhs = [](double, const Vec1& y) { return scalar(-y[0]); };
  const std::function<bool(double, const Vec1&)> below_half = [](double, const Vec1& y) {
    return y[0] < 0.5;
  };
  const auto sol = ode::integrate(rhs, 0.0, scalar(1.0), 50.0, {}, below_half);
  CHECK(sol.stopped_early());
  CHECK(sol.t_back() < 50.0);
  CHECK(sol.y_back()[0] < 0.5);
  CHECK(sol.y_back()[0] > 0.25);
}

TEST_CASE("solution rejects evaluation outside the span") {
  auto rhs = [](double, const Vec1& y) { return y; };
  const auto sol = ode::integrate(rhs, 0.0, scalar(1.0), 1.0);
  CHECK_THROWS_AS(sol(-0.5), domain_error);
  CHECK_THROWS_AS(sol(1.5), domain_error);
}

TEST_CASE("find_root refines a bracketed crossing") {
  auto f = [](double x) { return std::cos(x); };
  const double r = ode::find_root(f, 1.0, 2.0);
  CHECK(r == doctest::Approx(M_PI / 2.0).epsilon(1e-14));
  CHECK_THROWS_AS(ode::find_root(f, 0.0, 1.0), domain_error);
}
