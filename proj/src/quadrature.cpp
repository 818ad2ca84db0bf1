#include "pbe/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <queue>

#include "pbe/errors.hpp"

namespace pbe::quad {

namespace {

// Kronrod 15-point abscissae; odd indices are the embedded 7-point Gauss nodes.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment kronrod(const Integrand& f, double a, double b, int& evals) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double resk = fc * kWgk[7];
  double resg = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double f1 = f(c - dx);
    const double f2 = f(c + dx);
    resk += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
  }
  evals += 15;
  const double value = resk * h;
  const double err = std::abs((resk - resg) * h);
  return {a, b, value, err};
}

} // namespace

GaussRule gauss_legendre(int order) {
  if (order < 1) throw ConfigError("gauss_legendre: order must be >= 1");
  GaussRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[order - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.weights[i] = w;
    rule.weights[order - 1 - i] = w;
  }
  if (order == 1) {
    rule.nodes[0] = 0.0;
    rule.weights[0] = 2.0;
  }
  return rule;
}

Result integrate(const Integrand& f, double a, double b, double rel_tol, double abs_tol,
                 int max_intervals) {
  Result out;
  if (a == b) {
    out.converged = true;
    return out;
  }
  std::priority_queue<Segment> heap;
  Segment first = kronrod(f, a, b, out.evaluations);
  double total = first.value;
  double total_err = first.error;
  heap.push(first);
  int intervals = 1;
  while (total_err > std::max(abs_tol, rel_tol * std::abs(total))) {
    if (intervals >= max_intervals || !std::isfinite(total)) {
      out.value = total;
      out.error = total_err;
      out.converged = false;
      return out;
    }
    Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      // interval can no longer be split in floating point
      out.value = total;
      out.error = total_err;
      out.converged = total_err <= 1e3 * std::max(abs_tol, rel_tol * std::abs(total));
      return out;
    }
    Segment left = kronrod(f, worst.a, mid, out.evaluations);
    Segment right = kronrod(f, mid, worst.b, out.evaluations);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++intervals;
  }
  // re-sum to shed accumulated cancellation from the running updates
  double sum = 0.0, err = 0.0;
  while (!heap.empty()) {
    sum += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  out.value = sum;
  out.error = err;
  out.converged = true;
  return out;
}

Result integrate_to_infinity(const Integrand& f, double a, double rel_tol, double abs_tol,
                             int max_intervals) {
  auto mapped = [&](double u) {
    if (u >= 1.0) return 0.0;
    const double one_minus = 1.0 - u;
    const double y = a + u / one_minus;
    const double v = f(y);
    return v == 0.0 ? 0.0 : v / (one_minus * one_minus);
  };
  return integrate(mapped, 0.0, 1.0, rel_tol, abs_tol, max_intervals);
}

double integrate_graded(const Integrand& f, double a, double b, double grading, int panels,
                        const GaussRule& rule) {
  // uniform panels in u, x = a + (b - a) u^grading
  const double L = b - a;
  double sum = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double c = (i + 0.5) / panels;
    const double h = 0.5 / panels;
    double panel = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double u = c + h * rule.nodes[q];
      const double jac = grading * std::pow(u, grading - 1.0);
      panel += rule.weights[q] * jac * f(a + L * std::pow(u, grading));
    }
    sum += panel * h;
  }
  return sum * L;
}

Result integrate_left_singular(const Integrand& f, double a, double b, double singularity,
                               double rel_tol, int max_panels) {
  static const GaussRule rule = gauss_legendre(16);
  const double grading = 1.0 / (1.0 - std::clamp(singularity, 0.0, 0.999));
  Result out;
  int panels = 8;
  double prev = integrate_graded(f, a, b, grading, panels, rule);
  out.evaluations = panels * 16;
  while (panels < max_panels) {
    panels *= 2;
    const double cur = integrate_graded(f, a, b, grading, panels, rule);
    out.evaluations += panels * 16;
    const double diff = std::abs(cur - prev);
    prev = cur;
    if (diff <= rel_tol * std::abs(cur) || diff <= 1e-300) {
      out.value = cur;
      out.error = diff;
      out.converged = true;
      return out;
    }
    out.error = diff;
  }
  out.value = prev;
  out.converged = false;
  return out;
}

} // namespace pbe::quad
