#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pbe/grid.hpp"

namespace pbe::oracle {

/// Closed-form solution of the continuous equation together with the kernels it solves.
struct AnalyticSolution {
  std::string name;
  std::function<double(double, double)> density; ///< f(x, t)
  std::function<double(double)> number;          ///< N0(t)
  std::function<double(double)> mass;            ///< N1(t)
  std::function<double(double, double)> coagulation; ///< K(x, y)
  std::function<double(double)> selection;            ///< S(x)
  std::function<double(double, double)> breakage;     ///< b(x, y)
};

/// f(x, t) = 4/(2+t)^2 exp(-2x/(2+t)): K = 1, no fragmentation, f0 = exp(-x).
double constant_kernel_solution(double x, double t);

AnalyticSolution constant_kernel_exponential();
AnalyticSolution zero_solution();

/// Scales the density (and moments) of a solution; for negative tests of residual_check.
AnalyticSolution scaled(const AnalyticSolution& s, double factor);

struct Residual {
  double max_abs = 0.0;
  double worst_x = 0.0;
  double worst_t = 0.0;
};

/// Substitutes the solution into the continuous equation at every (x, t) sample: time
/// derivative by central differences with step 1e-5 (1 + t), integrals by adaptive quadrature.
/// Throws QuadratureError naming the sample on non-convergence.
Residual residual_check(const AnalyticSolution& solution, const std::vector<double>& xs,
                        const std::vector<double>& ts);

/// Mass-discrete system on masses 1..M (index i holds mass i + 1). Products heavier than M
/// leave the system.
struct DiscreteSystem {
  Matrix kernel;    ///< K(i, j)
  Vector selection; ///< S(i)
  Matrix fragments; ///< fragments(i, j): number of mass-(i+1) pieces from one mass-(j+1) particle

  int size() const { return static_cast<int>(selection.size()); }
};

/// Uniform discrete binary breakage: mass j splits into i and j - i with every i equally likely,
/// so fragments(i, j) = 2 / (j - 1) for i < j. Mass 1 has no fragments.
Matrix binary_uniform_fragments(int M);

/// Right-hand side of the discrete coagulation-fragmentation system, written as direct sums.
Vector discrete_rhs(const DiscreteSystem& sys, const Vector& c, double* leak_mass_rate = nullptr);

struct DiscreteTrajectory {
  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<double> number; ///< sum c_i
  std::vector<double> mass;   ///< sum i c_i
  std::vector<double> leaked_mass;
};

/// Step-doubling RK4 integration of the discrete system to tolerance `tol`, sampled at `times`
/// (ascending, starting at 0). M must not exceed 64.
DiscreteTrajectory discrete_smoluchowski_oracle(const DiscreteSystem& sys, const Vector& c0,
                                                const std::vector<double>& times, double tol = 1e-10);

} // namespace pbe::oracle
