#include <doctest.h>

#include <cmath>

#include "pbe/quadrature.hpp"

using namespace pbe;

TEST_CASE("gauss_legendre integrates polynomials of degree 2n-1 exactly") {
  for (int n : {1, 2, 5, 16}) {
    const auto rule = quad::gauss_legendre(n);
    REQUIRE(rule.nodes.size() == static_cast<std::size_t>(n));
    for (int d = 0; d <= 2 * n - 1; ++d) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += rule.weights[i] * std::pow(rule.nodes[i], d);
      const double exact = d % 2 ? 0.0 : 2.0 / (d + 1);
      CHECK(s == doctest::Approx(exact).epsilon(1e-14));
    }
  }
}

TEST_CASE("adaptive Gauss-Kronrod on smooth and peaked integrands") {
  auto r = quad::integrate([](double x) { return std::exp(x); }, 0.0, 1.0);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-14));

  r = quad::integrate([](double x) { return 1.0 / (1e-4 + x * x); }, -1.0, 1.0);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(2.0 / 1e-2 * std::atan(1.0 / 1e-2)).epsilon(1e-12));

  r = quad::integrate([](double) { return 1.0; }, 2.0, 2.0);
  CHECK(r.value == 0.0);
}

TEST_CASE("semi-infinite integration") {
  const auto r = quad::integrate_to_infinity([](double x) { return x * std::exp(-x); }, 0.0);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-12));
  const auto g = quad::integrate_to_infinity([](double x) { return x * x * std::exp(-2.0 * x); }, 0.0);
  CHECK(g.value == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("endpoint singularities resolved by the graded rule") {
  // reference values: Fresnel integral, incomplete gamma, substitution x = u^4
  auto r = quad::integrate_left_singular([](double x) { return std::cos(x) / std::sqrt(x); }, 0.0, 1.0, 0.5);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(1.80904847580054414883).epsilon(1e-12));

  r = quad::integrate_left_singular([](double x) { return std::pow(x, -0.9) * std::exp(-x); }, 0.0, 1.0, 0.9);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(9.283972028379885).epsilon(1e-10));

  r = quad::integrate_left_singular([](double x) { return std::log1p(x) * std::pow(x, -0.75); }, 0.0, 2.0, 0.75);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(1.31930660342133069417).epsilon(1e-11));
}

TEST_CASE("graded rule with grading 1 is plain composite Gauss") {
  const auto rule = quad::gauss_legendre(4);
  const double v = quad::integrate_graded([](double x) { return x * x * x; }, 0.0, 2.0, 1.0, 3, rule);
  CHECK(v == doctest::Approx(4.0).epsilon(1e-14));
}
