#include "pbe/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pbe/errors.hpp"
#include "pbe/quadrature.hpp"

namespace pbe::oracle {

double constant_kernel_solution(double x, double t) {
  const double s = 2.0 + t;
  return 4.0 / (s * s) * std::exp(-2.0 * x / s);
}

AnalyticSolution constant_kernel_exponential() {
  AnalyticSolution s;
  s.name = "constant-kernel-exponential";
  s.density = constant_kernel_solution;
  s.number = [](double t) { return 2.0 / (2.0 + t); };
  s.mass = [](double) { return 1.0; };
  s.coagulation = [](double, double) { return 1.0; };
  s.selection = [](double) { return 0.0; };
  s.breakage = [](double, double) { return 0.0; };
  return s;
}

AnalyticSolution zero_solution() {
  AnalyticSolution s;
  s.name = "zero";
  s.density = [](double, double) { return 0.0; };
  s.number = [](double) { return 0.0; };
  s.mass = [](double) { return 0.0; };
  s.coagulation = [](double, double) { return 0.0; };
  s.selection = [](double) { return 0.0; };
  s.breakage = [](double, double) { return 0.0; };
  return s;
}

AnalyticSolution scaled(const AnalyticSolution& s, double factor) {
  AnalyticSolution out = s;
  out.name = s.name + "-scaled";
  out.density = [f = s.density, factor](double x, double t) { return factor * f(x, t); };
  out.number = [f = s.number, factor](double t) { return factor * f(t); };
  out.mass = [f = s.mass, factor](double t) { return factor * f(t); };
  return out;
}

Residual residual_check(const AnalyticSolution& sol, const std::vector<double>& xs,
                        const std::vector<double>& ts) {
  Residual worst;
  for (double t : ts)
    for (double x : xs) {
      auto where = [&] {
        std::ostringstream os;
        os << "residual quadrature failed at (x, t) = (" << x << ", " << t << ")";
        return os.str();
      };
      auto f = [&](double y) { return sol.density(y, t); };
      const double h = 1e-5 * (1.0 + t);
      const double dfdt = (sol.density(x, t + h) - sol.density(x, t - h)) / (2.0 * h);

      const auto birth = quad::integrate(
          [&](double y) { return sol.coagulation(x - y, y) * f(x - y) * f(y); }, 0.0, x, 1e-12, 1e-15);
      const auto death = quad::integrate_to_infinity(
          [&](double y) { return y > 0.0 ? sol.coagulation(x, y) * f(y) : 0.0; }, 0.0, 1e-12, 1e-15);
      const auto frag = quad::integrate_to_infinity(
          [&](double y) { return sol.breakage(x, y) * sol.selection(y) * f(y); }, x, 1e-12, 1e-15);
      if (!birth.converged || !death.converged || !frag.converged) throw QuadratureError(where());

      const double fx = f(x);
      const double rhs = 0.5 * birth.value - fx * death.value + frag.value - sol.selection(x) * fx;
      const double r = std::abs(dfdt - rhs);
      if (r > worst.max_abs) {
        worst.max_abs = r;
        worst.worst_x = x;
        worst.worst_t = t;
      }
    }
  return worst;
}

Matrix binary_uniform_fragments(int M) {
  Matrix F = Matrix::Zero(M, M);
  for (int j = 2; j <= M; ++j)
    for (int i = 1; i < j; ++i) F(i - 1, j - 1) = 2.0 / (j - 1);
  return F;
}

Vector discrete_rhs(const DiscreteSystem& sys, const Vector& c, double* leak_mass_rate) {
  const int M = sys.size();
  Vector dc = Vector::Zero(M);
  double leak = 0.0;
  for (int k = 1; k <= M; ++k) {
    double gain = 0.0;
    for (int i = 1; i < k; ++i) gain += sys.kernel(i - 1, k - i - 1) * c(i - 1) * c(k - i - 1);
    double loss = 0.0;
    for (int j = 1; j <= M; ++j) loss += sys.kernel(k - 1, j - 1) * c(j - 1);
    double frag = 0.0;
    for (int j = k + 1; j <= M; ++j) frag += sys.fragments(k - 1, j - 1) * sys.selection(j - 1) * c(j - 1);
    dc(k - 1) = 0.5 * gain - c(k - 1) * loss + frag - sys.selection(k - 1) * c(k - 1);
  }
  for (int i = 1; i <= M; ++i)
    for (int j = 1; j <= M; ++j)
      if (i + j > M) leak += 0.5 * (i + j) * sys.kernel(i - 1, j - 1) * c(i - 1) * c(j - 1);
  if (leak_mass_rate) *leak_mass_rate = leak;
  return dc;
}

namespace {

// c and leaked mass packed into one vector
Vector packed_rhs(const DiscreteSystem& sys, const Vector& y) {
  const int M = sys.size();
  double leak = 0.0;
  Vector out(M + 1);
  out.head(M) = discrete_rhs(sys, y.head(M), &leak);
  out(M) = leak;
  return out;
}

Vector rk4(const DiscreteSystem& sys, const Vector& y, double h) {
  const Vector k1 = packed_rhs(sys, y);
  const Vector k2 = packed_rhs(sys, y + 0.5 * h * k1);
  const Vector k3 = packed_rhs(sys, y + 0.5 * h * k2);
  const Vector k4 = packed_rhs(sys, y + h * k3);
  return y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

} // namespace

DiscreteTrajectory discrete_smoluchowski_oracle(const DiscreteSystem& sys, const Vector& c0,
                                                const std::vector<double>& times, double tol) {
  const int M = sys.size();
  if (M < 1 || M > 64) throw ConfigError("discrete oracle supports 1 <= M <= 64");
  if (c0.size() != M || sys.kernel.rows() != M || sys.kernel.cols() != M || sys.fragments.rows() != M ||
      sys.fragments.cols() != M)
    throw ContractViolation("discrete oracle: dimension mismatch");
  if (times.empty() || times.front() != 0.0) throw ContractViolation("discrete oracle: times must start at 0");

  Vector masses(M);
  for (int i = 0; i < M; ++i) masses(i) = i + 1.0;

  DiscreteTrajectory out;
  Vector y(M + 1);
  y.head(M) = c0;
  y(M) = 0.0;
  double t = 0.0, h = 1e-3;
  auto record = [&] {
    out.times.push_back(t);
    out.states.push_back(y.head(M));
    out.number.push_back(y.head(M).sum());
    out.mass.push_back(masses.dot(y.head(M)));
    out.leaked_mass.push_back(y(M));
  };
  record();
  for (std::size_t s = 1; s < times.size(); ++s) {
    const double target = times[s];
    while (t < target) {
      const bool last = h >= target - t;
      const double step = last ? target - t : h;
      const Vector full = rk4(sys, y, step);
      const Vector half = rk4(sys, rk4(sys, y, 0.5 * step), 0.5 * step);
      const double err = (half - full).cwiseAbs().maxCoeff() / 15.0;
      const double scale = tol * std::max(1.0, y.cwiseAbs().maxCoeff());
      if (err > scale && step > 1e-12) {
        h = 0.5 * step;
        continue;
      }
      y = half + (half - full) / 15.0; // Richardson extrapolation
      t = last ? target : t + step;
      if (err < 0.1 * scale) h = std::min(2.0 * step, 0.1);
      else h = step;
    }
    record();
  }
  return out;
}

} // namespace pbe::oracle
