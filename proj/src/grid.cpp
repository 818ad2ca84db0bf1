#include "pbe/grid.hpp"

#include <cmath>
#include <string>

#include "pbe/errors.hpp"
#include "pbe/quadrature.hpp"

namespace pbe {

Grid build_grid(double x_min, double x_max, int m) {
  if (!(x_min > 0.0)) throw ConfigError("grid: x_min must be positive");
  if (!(x_max > x_min)) throw ConfigError("grid: x_max must exceed x_min");
  if (m < 1) throw ConfigError("grid: cell count must be at least 1");
  Grid g;
  g.ratio = std::pow(x_max / x_min, 1.0 / m);
  g.boundaries.resize(m + 1);
  const double lmin = std::log(x_min), lmax = std::log(x_max);
  g.boundaries(0) = x_min;
  for (int i = 1; i < m; ++i) g.boundaries(i) = std::exp(lmin + (lmax - lmin) * i / m);
  g.boundaries(m) = x_max;
  g.pivots = (g.boundaries.head(m).array() * g.boundaries.tail(m).array()).sqrt();
  return g;
}

Grid grid_from_pivots(const std::vector<double>& pivots) {
  const auto m = static_cast<Eigen::Index>(pivots.size());
  if (m < 1) throw ConfigError("grid: need at least one pivot");
  if (!(pivots[0] > 0.0)) throw ConfigError("grid: pivots must be positive");
  for (Eigen::Index i = 1; i < m; ++i)
    if (!(pivots[i] > pivots[i - 1])) throw ConfigError("grid: pivots must be strictly increasing");
  Grid g;
  g.pivots = Eigen::Map<const Vector>(pivots.data(), m);
  g.boundaries.resize(m + 1);
  if (m == 1) {
    g.boundaries << 0.5 * pivots[0], 1.5 * pivots[0];
    return g;
  }
  for (Eigen::Index i = 1; i < m; ++i) g.boundaries(i) = 0.5 * (pivots[i - 1] + pivots[i]);
  const double lower = pivots[0] - 0.5 * (pivots[1] - pivots[0]);
  g.boundaries(0) = lower > 0.0 ? lower : 0.5 * pivots[0];
  g.boundaries(m) = pivots[m - 1] + 0.5 * (pivots[m - 1] - pivots[m - 2]);
  return g;
}

InitialProfile InitialProfile::zero() { return {ProfileKind::zero}; }

InitialProfile InitialProfile::exponential(double mean, double number) {
  InitialProfile p{ProfileKind::exponential};
  p.mean = mean;
  p.number = number;
  return p;
}

InitialProfile InitialProfile::monodisperse(int cell, double amount) {
  InitialProfile p{ProfileKind::monodisperse};
  p.cell = cell;
  p.amount = amount;
  return p;
}

InitialProfile InitialProfile::tabulated(std::shared_ptr<const Table1D> table) {
  InitialProfile p{ProfileKind::tabulated};
  p.table = std::move(table);
  return p;
}

double InitialProfile::density(double x) const {
  switch (kind) {
  case ProfileKind::zero:
    return 0.0;
  case ProfileKind::exponential:
    return number / mean * std::exp(-x / mean);
  case ProfileKind::tabulated:
    if (x < table->x().front() || x > table->x().back()) return 0.0;
    return (*table)(x);
  case ProfileKind::monodisperse:
    break;
  }
  throw ContractViolation("monodisperse profile has no pointwise density");
}

DensityState project_initial(const InitialProfile& profile, const Grid& grid) {
  const Eigen::Index m = grid.size();
  DensityState s;
  s.conc = Vector::Zero(m);
  switch (profile.kind) {
  case ProfileKind::zero:
    return s;
  case ProfileKind::monodisperse:
    if (profile.cell < 0 || profile.cell >= m)
      throw ConfigError("initial: monodisperse cell index " + std::to_string(profile.cell) + " outside grid");
    if (!(profile.amount >= 0.0)) throw ConfigError("initial: monodisperse amount must be nonnegative");
    s.conc(profile.cell) = profile.amount;
    return s;
  case ProfileKind::exponential:
    if (!(profile.mean > 0.0) || !(profile.number >= 0.0))
      throw ConfigError("initial: exponential profile needs mean > 0 and number >= 0");
    break;
  case ProfileKind::tabulated:
    if (!profile.table) throw ConfigError("initial: tabulated profile has no table");
    if (profile.table->min_value() < 0.0) throw ConfigError("initial: tabulated density is negative");
    break;
  }

  auto f = [&](double x) { return profile.density(x); };
  auto check = [](const quad::Result& r) {
    if (!r.converged) throw QuadratureError("initial projection quadrature did not converge");
    return r.value;
  };
  const Vector& p = grid.pivots;
  const double lo = grid.x_min(), hi = grid.x_max();
  s.conc(0) += check(quad::integrate([&](double x) { return x / p(0) * f(x); }, lo, p(0), 1e-13, 1e-300));
  s.conc(m - 1) +=
      check(quad::integrate([&](double x) { return x / p(m - 1) * f(x); }, p(m - 1), hi, 1e-13, 1e-300));
  for (Eigen::Index i = 0; i + 1 < m; ++i) {
    const double a = p(i), b = p(i + 1), w = b - a;
    s.conc(i) += check(quad::integrate([&](double x) { return (b - x) / w * f(x); }, a, b, 1e-13, 1e-300));
    s.conc(i + 1) += check(quad::integrate([&](double x) { return (x - a) / w * f(x); }, a, b, 1e-13, 1e-300));
  }
  return s;
}

Vector density_estimate(const DensityState& state, const Grid& grid) {
  if (state.conc.size() != grid.size()) throw ContractViolation("density_estimate: state does not match grid");
  return state.conc.cwiseQuotient(grid.widths());
}

} // namespace pbe
