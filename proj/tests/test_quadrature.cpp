#include <cmath>

#include <doctest.h>

#include "rough/quadrature.hpp"

using namespace rough;

TEST_CASE("polynomial integrals are exact to tolerance") {
  auto r = integrate_or_throw([](double x) { return x * x; }, 0.0, 1.0);
  CHECK(r == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  auto s = integrate_or_throw([](double x) { return std::pow(x, 7); }, -1.0,
                              2.0);
  CHECK(s == doctest::Approx((256.0 - 1.0) / 8.0).epsilon(1e-12));
}

TEST_CASE("oscillatory and peaked integrands converge") {
  auto osc = integrate_or_throw([](double x) { return std::sin(50.0 * x); },
                                0.0, 3.14159265358979323846);
  // int_0^pi sin(50 x) dx = (1 - cos(50 pi)) / 50 = 2/50 for even multiples
  CHECK(osc ==
        doctest::Approx((1.0 - std::cos(50.0 * 3.14159265358979323846)) / 50.0)
            .epsilon(1e-9));
  double w = 1e-3;
  auto peak = integrate_or_throw(
      [w](double x) {
        return std::exp(-(x - 0.3) * (x - 0.3) / (2.0 * w * w));
      },
      0.0, 1.0);
  CHECK(peak ==
        doctest::Approx(std::sqrt(2.0 * 3.14159265358979323846) * w)
            .epsilon(1e-7));
}

TEST_CASE("mild endpoint singularity x^{-1/2}") {
  auto r = integrate_or_throw([](double x) { return 1.0 / std::sqrt(x); },
                              0.0, 1.0, {1e-10, 0.0, 8000});
  CHECK(r == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("unreachable tolerance reports failure") {
  QuadOptions opts;
  opts.rel_tol = 1e-14;
  opts.max_intervals = 4;
  auto f = [](double x) { return std::sqrt(std::abs(std::sin(37.0 * x))); };
  auto r = integrate(f, 0.0, 5.0, opts);
  CHECK_FALSE(r.converged);
  CHECK_THROWS_AS(integrate_or_throw(f, 0.0, 5.0, opts), ConvergenceError);
}

TEST_CASE("logarithmic tail with power-law decay") {
  // int_2^inf u^{-1.5} du = 2 / sqrt(2)
  double v = integrate_log_tail([](double u) { return std::pow(u, -1.5); },
                                2.0, 1.5, 1e-7);
  CHECK(v == doctest::Approx(2.0 / std::sqrt(2.0)).epsilon(1e-4));
  // Prefactor variation: u^{-2} (1 + 1/u), int_3^inf = 1/3 + 1/18
  double w = integrate_log_tail(
      [](double u) { return (1.0 + 1.0 / u) / (u * u); }, 3.0, 2.0, 1e-7);
  CHECK(w == doctest::Approx(1.0 / 3.0 + 1.0 / 18.0).epsilon(1e-4));
}
