#include "pbe/operators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <thread>

#include "pbe/errors.hpp"
#include "pbe/quadrature.hpp"

namespace pbe {

namespace {

template <typename Fn>
void parallel_for(Eigen::Index n, Fn&& fn) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const auto workers = static_cast<Eigen::Index>(std::min<unsigned>(hw, 8));
  if (workers <= 1 || n < 16) {
    for (Eigen::Index i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  for (Eigen::Index w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (Eigen::Index i = w; i < n; i += workers) fn(i);
    });
  for (auto& t : pool) t.join();
}

AggregationChannel make_channel(const Grid& grid, Eigen::Index j, Eigen::Index k, double K) {
  const Vector& p = grid.pivots;
  const Eigen::Index m = grid.size();
  AggregationChannel c;
  c.j = j;
  c.k = k;
  c.kernel = j == k ? 0.5 * K : K;
  const double v = p(j) + p(k);
  if (v > grid.x_max()) {
    c.leak_mass = v;
  } else if (v >= p(m - 1)) {
    // between the last pivot and the upper boundary: keep the mass in the last cell
    c.lower = m - 1;
    c.lower_weight = v / p(m - 1);
  } else {
    const auto* begin = p.data();
    const auto* it = std::upper_bound(begin, begin + m, v);
    const Eigen::Index i = (it - begin) - 1; // p(i) <= v < p(i+1); v > p(0) always
    const double width = p(i + 1) - p(i);
    c.lower = i;
    c.upper = i + 1;
    c.lower_weight = (p(i + 1) - v) / width;
    c.upper_weight = (v - p(i)) / width;
  }
  return c;
}

void build_channels(OperatorTables& t) {
  const Eigen::Index m = t.grid.size();
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index k = 0; k <= j; ++k)
      if (t.coagulation(j, k) != 0.0) t.channels.push_back(make_channel(t.grid, j, k, t.coagulation(j, k)));
}

double integral(const quad::Integrand& f, double a, double b, Eigen::Index parent) {
  if (!(b > a)) return 0.0;
  const auto r = quad::integrate(f, a, b, 1e-14, 1e-300, 20000);
  if (!r.converged)
    throw QuadratureError("fragment table quadrature did not converge for parent cell " + std::to_string(parent));
  return r.value;
}

} // namespace

OperatorTables assemble(const KernelSystem& system, const Grid& grid) {
  const Eigen::Index m = grid.size();
  const Vector& p = grid.pivots;
  OperatorTables t;
  t.grid = grid;
  t.coagulation.resize(m, m);
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index k = 0; k <= j; ++k) {
      const double K = coagulation_rate(system, p(j), p(k));
      t.coagulation(j, k) = K;
      t.coagulation(k, j) = K;
    }
  build_channels(t);

  t.fragmentation_loss.resize(m);
  for (Eigen::Index j = 0; j < m; ++j) t.fragmentation_loss(j) = selection_rate(system, p(j));
  t.fragmentation_gain = Matrix::Zero(m, m);
  t.fragmentation_leak = Vector::Zero(m);

  const double x_min = grid.x_min();
  std::vector<std::string> failures(m);
  parallel_for(m, [&](Eigen::Index j) {
    const double S = t.fragmentation_loss(j);
    if (S == 0.0) return;
    const double y = p(j);
    auto b = [&](double x) { return x > 0.0 ? breakage_density(system, x, y) : 0.0; };
    try {
      Vector counts = Vector::Zero(m);
      counts(0) += integral([&](double x) { return x / p(0) * b(x); }, x_min, std::min(p(0), y), j);
      for (Eigen::Index l = 0; l < j; ++l) {
        const double lo = p(l), hi = p(l + 1), w = hi - lo;
        counts(l) += integral([&](double x) { return (hi - x) / w * b(x); }, lo, hi, j);
        counts(l + 1) += integral([&](double x) { return (x - lo) / w * b(x); }, lo, hi, j);
      }
      const auto below = quad::integrate_left_singular([&](double x) { return x * b(x); }, 0.0, x_min,
                                                       system.breakage.gamma, 1e-13);
      // Column mass balance closes exactly by construction; the physical loss below
      // x_min must agree with the residual or b does not conserve mass.
      const double residual = y - p.dot(counts);
      if (std::abs(residual - below.value) > 1e-8 * y)
        failures[j] = "breakage function does not conserve mass for parent mass " + std::to_string(y) +
                      " (fragment mass defect " + std::to_string((residual - below.value) / y) + ")";
      t.fragmentation_gain.col(j) = S * counts;
      t.fragmentation_leak(j) = S * residual;
    } catch (const std::exception& e) {
      failures[j] = e.what();
    }
  });
  for (const auto& f : failures)
    if (!f.empty()) throw ConfigError(f);
  return t;
}

OperatorTables assemble_discrete(const Matrix& kernel, const Vector& selection, const Matrix& fragments,
                                 const Grid& grid) {
  const Eigen::Index m = grid.size();
  if (kernel.rows() != m || kernel.cols() != m || selection.size() != m || fragments.rows() != m ||
      fragments.cols() != m)
    throw ContractViolation("assemble_discrete: table dimensions do not match the grid");
  OperatorTables t;
  t.grid = grid;
  t.coagulation = 0.5 * (kernel + kernel.transpose());
  build_channels(t);
  t.fragmentation_loss = selection;
  t.fragmentation_gain = fragments * selection.asDiagonal();
  t.fragmentation_leak.resize(m);
  for (Eigen::Index j = 0; j < m; ++j)
    t.fragmentation_leak(j) = selection(j) * (grid.pivots(j) - grid.pivots.dot(fragments.col(j)));
  return t;
}

Rates apply(const OperatorTables& tables, const Vector& conc) {
  const Eigen::Index m = tables.grid.size();
  if (conc.size() != m) throw ContractViolation("apply: state dimension does not match the grid");
  Rates r;
  r.dconc = Vector::Zero(m);
  if (tables.has_coagulation()) {
    for (const auto& c : tables.channels) {
      const double rate = c.kernel * conc(c.j) * conc(c.k);
      if (rate == 0.0) continue;
      if (c.lower >= 0) r.dconc(c.lower) += c.lower_weight * rate;
      if (c.upper >= 0) r.dconc(c.upper) += c.upper_weight * rate;
      r.leak_mass_rate += c.leak_mass * rate;
    }
    r.dconc -= conc.cwiseProduct(tables.coagulation * conc);
  }
  if (tables.has_fragmentation()) {
    r.dconc += tables.fragmentation_gain * conc;
    r.dconc -= tables.fragmentation_loss.cwiseProduct(conc);
    r.leak_mass_rate += tables.fragmentation_leak.dot(conc);
  }
  return r;
}

Rates apply(const OperatorTables& tables, const DensityState& state) { return apply(tables, state.conc); }

void write_fragmentation_csv(const OperatorTables& tables, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  char buf[32];
  const Matrix& G = tables.fragmentation_gain;
  out << "x_pivot";
  for (Eigen::Index j = 0; j < G.cols(); ++j) {
    std::snprintf(buf, sizeof buf, "%.17g", tables.grid.pivots(j));
    out << ',' << buf;
  }
  out << '\n';
  for (Eigen::Index i = 0; i < G.rows(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", tables.grid.pivots(i));
    out << buf;
    for (Eigen::Index j = 0; j < G.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", G(i, j));
      out << ',' << buf;
    }
    out << '\n';
  }
}

} // namespace pbe
