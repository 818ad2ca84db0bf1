#pragma once

#include <functional>
#include <vector>

namespace pbe::quad {

using Integrand = std::function<double(double)>;

struct Result {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
  bool converged = false;
};

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussRule gauss_legendre(int order);

/// Globally adaptive Gauss-Kronrod (7/15) integration on a finite interval.
/// Stops once the estimated error is below max(abs_tol, rel_tol * |I|)
/// or `max_intervals` subintervals have been used (then converged = false).
Result integrate(const Integrand& f, double a, double b, double rel_tol = 1e-12,
                 double abs_tol = 1e-300, int max_intervals = 4000);

/// Integral over [a, inf) through the map y = a + u / (1 - u).
Result integrate_to_infinity(const Integrand& f, double a, double rel_tol = 1e-12,
                             double abs_tol = 1e-300, int max_intervals = 4000);

/// Composite Gauss rule on a mesh graded towards `a`: panel edges
/// a + (b - a) * (i / panels)^grading, with nodes and weights mapped from the uniform variable.
/// Fixed cost, no error estimate.
double integrate_graded(const Integrand& f, double a, double b, double grading, int panels,
                        const GaussRule& rule);

/// Integral over [a, b] of an integrand that may behave like (x - a)^(-singularity)
/// near the left endpoint, singularity in [0, 1). Uses graded composite Gauss
/// with grading 1 / (1 - singularity) and doubles the panel count until two
/// successive values agree to rel_tol.
Result integrate_left_singular(const Integrand& f, double a, double b, double singularity,
                               double rel_tol = 1e-12, int max_panels = 1 << 14);

} // namespace pbe::quad
