#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pbe/grid.hpp"
#include "pbe/kernels.hpp"
#include "pbe/operators.hpp"

namespace pbe {

struct IntegratorConfig {
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  double dt_init = 1e-4;
  double dt_max = 0.1;
  double t_end = 1.0;

  bool operator==(const IntegratorConfig&) const = default;
};

std::vector<std::string> constraint_violations(const IntegratorConfig& cfg);

struct StepResult {
  DensityState state; ///< input state when rejected
  bool accepted = false;
  double dt_next = 0.0;
  double clipped_mass = 0.0; ///< mass added by clipping small negative components to zero
  double error_norm = 0.0;
};

/// Maximum step growth factor.
inline constexpr double kStepGrowth = 5.0;

/// One Dormand-Prince 5(4) step with mixed-tolerance error control. Negative components below
/// -abs_tol reject the step and halve dt; components in [-abs_tol, 0) are clipped to zero.
/// Throws StiffnessError when dt < 1e-14 * t_end.
StepResult step(const DensityState& state, const OperatorTables& tables, double dt,
                const IntegratorConfig& cfg);

struct MomentSample {
  double N0 = 0.0;
  double N1 = 0.0;
  double N2 = 0.0;
  double N_neg_gamma = 0.0;
};

struct RunOutput {
  Grid grid;
  IntegratorConfig integrator;
  double gamma = 0.5;               ///< order of the negative moment series
  std::vector<double> times;        ///< snapshot times, 0 .. t_end
  std::vector<DensityState> states; ///< one per snapshot
  std::vector<MomentSample> moments;
  std::vector<double> clipped_mass; ///< cumulative clipped mass per snapshot
  std::vector<double> step_sizes;   ///< accepted step sizes in order
  int accepted_steps = 0;
  int rejected_steps = 0;
  std::vector<std::string> flags;

  double initial_mass() const { return moments.front().N1; }
};

/// Uniform snapshot times k * t_end / count, k = 0..count.
std::vector<double> uniform_snapshots(double t_end, int count);

/// Integrates from `initial` to cfg.t_end, recording the state at each snapshot time
/// (which must start at initial.t and end at t_end).
RunOutput integrate(const OperatorTables& tables, const DensityState& initial, const IntegratorConfig& cfg,
                    const std::vector<double>& snapshot_times, double gamma = 0.5);

struct GridSpec {
  double x_min = 1e-6;
  double x_max = 1e3;
  int cells = 180;

  bool operator==(const GridSpec&) const = default;
};

/// Everything needed for one simulation.
struct Simulation {
  KernelSystem system;
  GridSpec grid;
  InitialProfile initial = InitialProfile::exponential(1.0);
  IntegratorConfig integrator;
  std::optional<TruncationParams> truncation;
  int snapshot_count = 10;
  bool strict = true; ///< refuse kernel systems that fail verification
};

/// Verifies the kernel system (strict mode), builds grid and tables, projects the initial
/// data and integrates. Throws ConfigError before stepping if verification fails.
RunOutput integrate(const Simulation& sim);

/// The kernel system actually integrated: the base system, truncated when requested.
KernelSystem effective_system(const Simulation& sim);

} // namespace pbe
