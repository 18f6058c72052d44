#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "mixstab/quadrature.hpp"

using namespace mixstab;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("exponential tail integrates to one", "[quadrature]") {
  const auto r = integrate_semi_infinite([](double k) { return std::exp(-k); }, 0.0, 1.0);
  REQUIRE(r.converged);
  REQUIRE_THAT(r.value, WithinRel(1.0, 1e-10));
  REQUIRE(r.error_bound < 1e-8);
}

TEST_CASE("lorentzian with displaced scale", "[quadrature]") {
  // int_0^inf dk / (k^2 + 16) = pi / 8; scale hint far from the true width.
  const auto r =
      integrate_semi_infinite([](double k) { return 1.0 / (k * k + 16.0); }, 0.0, 1.0);
  REQUIRE(r.converged);
  REQUIRE_THAT(r.value, WithinRel(std::numbers::pi / 8.0, 1e-10));
}

TEST_CASE("slowly decaying depletion-like integrand", "[quadrature]") {
  // int_0^inf [k/sqrt(k^2+4) - 1] dk = -2 exactly (antiderivative sqrt(k^2+4) - k).
  const auto r = integrate_semi_infinite(
      [](double k) { return k / std::sqrt(k * k + 4.0) - 1.0; }, 0.0, 2.0);
  REQUIRE(r.converged);
  REQUIRE_THAT(r.value, WithinRel(-2.0, 1e-10));

  // Doubled and divided by 2 pi, as the pairing-channel sum uses it.
  const auto s = integrate_semi_infinite(
      [](double k) {
        return (1.0 / std::numbers::pi) * (k / std::sqrt(k * k + 4.0) - 1.0);
      },
      0.0, 2.0);
  REQUIRE_THAT(s.value, WithinRel(-2.0 / std::numbers::pi, 1e-10));
}

TEST_CASE("finite upper limit", "[quadrature]") {
  const auto r = integrate_semi_infinite([](double k) { return k * k; }, 0.0, 1.0,
                                         QuadratureSettings{}, 1.0);
  REQUIRE_THAT(r.value, WithinRel(1.0 / 3.0, 1e-12));
}

TEST_CASE("lower cutoff shifts the window", "[quadrature]") {
  const auto r = integrate_semi_infinite([](double k) { return std::exp(-k); }, 1.0, 1.0);
  REQUIRE_THAT(r.value, WithinRel(std::exp(-1.0), 1e-10));
}

TEST_CASE("result is stable under subdivision budget doubling", "[quadrature]") {
  QuadratureSettings a;
  QuadratureSettings b;
  b.max_subdivisions = 2 * a.max_subdivisions;
  auto f = [](double k) { return std::exp(-0.37 * k) * std::cos(3.0 * k); };
  const auto ra = integrate_semi_infinite(f, 0.0, 1.0, a);
  const auto rb = integrate_semi_infinite(f, 0.0, 1.0, b);
  REQUIRE(ra.converged);
  REQUIRE_THAT(ra.value, WithinRel(rb.value, 2.0 * a.rel_tol));
}

TEST_CASE("tight budget reports non-convergence with a best estimate", "[quadrature]") {
  // One subdivision cannot push a non-polynomial integrand below the
  // roundoff-floored error estimate at this tolerance.
  QuadratureSettings s;
  s.max_subdivisions = 1;
  s.rel_tol = 1e-14;
  s.abs_tol = 0.0;
  const auto r = integrate_semi_infinite(
      [](double k) { return 1.0 / (1.0 + k * k); }, 0.0, 1.0, s);
  REQUIRE_FALSE(r.converged);
  REQUIRE(std::isfinite(r.value));
  REQUIRE_THAT(r.value, WithinRel(std::numbers::pi / 2.0, 1e-3));
  REQUIRE(r.error_bound > 0.0);
}

TEST_CASE("invalid windows are rejected", "[quadrature]") {
  auto f = [](double k) { return std::exp(-k); };
  REQUIRE_THROWS_AS(integrate_semi_infinite(f, 0.0, 0.0), std::invalid_argument);
  REQUIRE_THROWS_AS(integrate_semi_infinite(f, -1.0, 1.0), std::invalid_argument);
  REQUIRE_THROWS_AS(integrate_semi_infinite(f, 2.0, 1.0, QuadratureSettings{}, 1.0),
                    std::invalid_argument);
}

TEST_CASE("evaluation count is reported", "[quadrature]") {
  const auto r = integrate_semi_infinite([](double k) { return std::exp(-k); }, 0.0, 1.0);
  REQUIRE(r.evaluations > 0);
  REQUIRE(r.subdivisions >= 1);
  REQUIRE(double(r) == r.value);
}
