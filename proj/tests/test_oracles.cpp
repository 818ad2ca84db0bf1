#include <doctest.h>

#include <cmath>

#include "pbe/errors.hpp"
#include "pbe/oracles.hpp"
#include "pbe/quadrature.hpp"
#include "pbe/solver.hpp"

using namespace pbe;

namespace {

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(a + (b - a) * i / (n - 1));
  return v;
}

} // namespace

TEST_CASE("constant-kernel solution starts from the exponential") {
  for (double x : {0.0, 0.3, 1.0, 7.5}) CHECK(oracle::constant_kernel_solution(x, 0.0) == doctest::Approx(std::exp(-x)));
}

TEST_CASE("constant-kernel solution moments by quadrature") {
  for (double t : {0.0, 0.5, 1.0, 3.0}) {
    const auto n0 = quad::integrate_to_infinity([t](double x) { return oracle::constant_kernel_solution(x, t); }, 0.0);
    const auto n1 =
        quad::integrate_to_infinity([t](double x) { return x * oracle::constant_kernel_solution(x, t); }, 0.0);
    CHECK(n0.value == doctest::Approx(2.0 / (2.0 + t)).epsilon(1e-12));
    CHECK(n1.value == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("residual check certifies the constant-kernel solution") {
  const auto xs = linspace(0.01, 20.0, 25);
  const auto ts = linspace(0.0, 2.0, 9);
  const auto r = oracle::residual_check(oracle::constant_kernel_exponential(), xs, ts);
  CHECK(r.max_abs <= 1e-6);

  CHECK(oracle::residual_check(oracle::zero_solution(), xs, ts).max_abs == 0.0);

  const auto bad = oracle::residual_check(oracle::scaled(oracle::constant_kernel_exponential(), 1.01), xs, ts);
  CHECK(bad.max_abs > 1e-3);
  CHECK(bad.worst_x >= 0.01);
}

TEST_CASE("discrete oracle matches the sectional solver on the unit grid") {
  const int M = 8;
  oracle::DiscreteSystem sys{Matrix::Constant(M, M, 1.0), Vector::Zero(M), Matrix::Zero(M, M)};
  Vector c0 = Vector::Zero(M);
  c0(0) = 1.0;
  const auto traj = oracle::discrete_smoluchowski_oracle(sys, c0, {0.0, 0.5, 1.0});

  std::vector<double> masses;
  for (int i = 1; i <= M; ++i) masses.push_back(i);
  const Grid g = grid_from_pivots(masses);
  const auto tables = assemble_discrete(sys.kernel, sys.selection, sys.fragments, g);
  DensityState init;
  init.conc = c0;
  IntegratorConfig cfg;
  cfg.rel_tol = 1e-10;
  cfg.abs_tol = 1e-14;
  const auto run = integrate(tables, init, cfg, {0.0, 0.5, 1.0});
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(std::abs(run.moments[i].N0 - traj.number[i]) <= 1e-6);
    CHECK(std::abs(run.states[i].leaked_mass - traj.leaked_mass[i]) <= 1e-6);
  }
  // pair (1,1) gives N0' = -N0^2/2 while nothing leaks
  CHECK(traj.number[1] == doctest::Approx(2.0 / 2.5).epsilon(1e-3));
}

TEST_CASE("discrete oracle with zero kernels is constant") {
  const int M = 6;
  oracle::DiscreteSystem sys{Matrix::Zero(M, M), Vector::Zero(M), Matrix::Zero(M, M)};
  const Vector c0 = Vector::LinSpaced(M, 1.0, 2.0);
  const auto traj = oracle::discrete_smoluchowski_oracle(sys, c0, {0.0, 1.0, 2.0});
  for (const auto& s : traj.states) CHECK(s == c0);
}

TEST_CASE("binary breakage of mass 2 produces two unit particles") {
  const int M = 4;
  Vector S = Vector::Zero(M);
  S(1) = 1.0;
  oracle::DiscreteSystem sys{Matrix::Zero(M, M), S, oracle::binary_uniform_fragments(M)};
  CHECK(sys.fragments(0, 1) == 2.0);
  Vector c = Vector::Zero(M);
  c(1) = 0.8;
  const Vector r = oracle::discrete_rhs(sys, c);
  CHECK(r(1) == doctest::Approx(-0.8));
  CHECK(r(0) == doctest::Approx(-2.0 * r(1)));
}

TEST_CASE("discrete oracle conserves mass without a leak channel") {
  const int M = 16;
  Vector S = Vector::LinSpaced(M, 1.0, 16.0);
  S(0) = 0.0;
  oracle::DiscreteSystem sys{Matrix::Zero(M, M), S, oracle::binary_uniform_fragments(M)};
  Vector c0 = Vector::Zero(M);
  c0(M - 1) = 1.0;
  const auto traj = oracle::discrete_smoluchowski_oracle(sys, c0, {0.0, 0.5, 1.0, 2.0});
  for (double m : traj.mass) CHECK(std::abs(m - 16.0) <= 1e-10 * 16.0);
  CHECK(traj.number.back() > 1.0);
}

TEST_CASE("discrete oracle size limit") {
  oracle::DiscreteSystem sys{Matrix::Zero(65, 65), Vector::Zero(65), Matrix::Zero(65, 65)};
  CHECK_THROWS_AS(oracle::discrete_smoluchowski_oracle(sys, Vector::Zero(65), {0.0, 1.0}), ConfigError);
}
