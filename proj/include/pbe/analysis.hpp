#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pbe/grid.hpp"
#include "pbe/kernels.hpp"
#include "pbe/moments.hpp"
#include "pbe/solver.hpp"

namespace pbe {

/// Moment of the given order of a state on its grid.
double moment(const DensityState& state, double order, const Grid& grid);

/// sum_i (pivot_i^r1 + pivot_i^{-r2}) conc_i; requires r1 >= 1 and 0 < r2 < 1.
double omega_norm(const DensityState& state, double r1, double r2, const Grid& grid);

/// Omega-weighted distance between two states on the same grid.
double omega_distance(const DensityState& a, const DensityState& b, double r1, double r2, const Grid& grid);

struct MomentReport {
  std::vector<double> orders;
  std::vector<double> times;
  std::vector<std::vector<double>> values; ///< values[snapshot][order]
};

MomentReport moment_report(const RunOutput& run, const std::vector<double>& orders);

struct BoundCheck {
  std::string name;
  bool pass = true;
  int first_violation = -1; ///< snapshot index
  double worst_ratio = 0.0; ///< observed / bound, or ledger defect / tolerance
  std::string detail;
};

struct MomentBoundReport {
  BoundCheck mass;          ///< N1 + leak - clipped = N1(0)
  BoundCheck number;        ///< N0(t) <= (N0(0) + N1bar) exp(N S0 t)
  BoundCheck second_moment; ///< Gronwall envelope for N2
  BoundCheck negative;      ///< N_{-gamma} finite

  bool all_ok() const { return mass.pass && number.pass && second_moment.pass && negative.pass; }
};

/// Mass-ledger tolerance used by the bound checks: 10 x the integrator tolerance.
double mass_ledger_tolerance(const RunOutput& run);

MomentBoundReport check_moment_bounds(const RunOutput& run, const KernelSystem& system);

/// Constants of the uniform envelope h(x, t) on the strip [X1, X2].
struct EnvelopeConstants {
  double X1 = 0.0;
  double X2 = 0.0;
  double X = 0.0; ///< max{1/X1, X2}
  double h0 = 0.0;
  double k = 0.0;
  double lambda = 0.0;
  double sigma = 0.0;
  double b_bar = 0.0;
  double S0 = 0.0;
  double moment_bound = 0.0; ///< running max of N_{ceil(alpha)} over the run
};

/// h0 = max{ max of the initial g-surrogate over strip pivots, X^sigma S0 b_bar Nbar }.
EnvelopeConstants make_envelope_constants(const RunOutput& run, const KernelSystem& system, double X1, double X2);

/// h(x, t) = h0 exp{ h0 x k (1+X)^lambda X^sigma (e^t - 1) / 2 + t }
double envelope(const EnvelopeConstants& c, double x, double t);

struct EnvelopeVerdict {
  bool pass = true;
  double worst_ratio = 0.0; ///< max of g / h
  double worst_x = 0.0;
  double worst_t = 0.0;
  int points_checked = 0;
};

/// g-surrogate (conc / width) / pivot^sigma against h at every snapshot and strip pivot.
EnvelopeVerdict envelope_check(const RunOutput& run, const EnvelopeConstants& constants, double X1, double X2);

struct UniquenessExponents {
  double k1 = 0.0;
  double k2 = 0.0;
  double k1_lo = 0.0; ///< feasible interval for k1
  double k1_hi = 0.0;
  bool k2_exceeds_gamma = false; ///< warning only
};

/// k1 = midpoint of its feasible interval, k2 = its upper bound. Throws ConfigError naming
/// the empty interval when infeasible.
UniquenessExponents choose_uniqueness_exponents(double lambda, double sigma, double alpha, double r2,
                                                std::optional<double> gamma = std::nullopt);

/// sum_i (pivot_i^k1 + pivot_i^{-k2}) |conc1_i - conc2_i|
double uniqueness_distance(const DensityState& s1, const DensityState& s2, const UniquenessExponents& exps,
                           const Grid& grid);

struct StudyEntry {
  int n = 0;
  double distance_final = 0.0; ///< to the untruncated run at t_end
  double distance_mid = 0.0;   ///< at t_end / 2
};

struct StudyReport {
  double r1 = 2.0;
  double r2 = 0.5;
  std::vector<StudyEntry> entries;
  std::vector<double> pairwise_final; ///< d(f_{n_i}, f_{n_{i+1}}) at t_end
  std::vector<double> pairwise_mid;
  bool nonincreasing = true;
  bool strictly_decreasing = true;
};

/// Runs the base simulation untruncated and once per n (concurrently), then compares.
StudyReport truncation_study(const Simulation& base, const std::vector<int>& n_list, double r1 = 2.0,
                             double r2 = 0.5, double ramp = 0.5);

} // namespace pbe
