#pragma once

#include <string>
#include <vector>

#include "pbe/grid.hpp"
#include "pbe/kernels.hpp"

namespace pbe {

/// One aggregation channel (j, k), j >= k. The product particle of mass pivot_j + pivot_k
/// is split between `lower` and `upper` (fixed-pivot two-point rule) or, when it lands
/// above the grid, counted in `leak_mass`.
struct AggregationChannel {
  Eigen::Index j = 0;
  Eigen::Index k = 0;
  double kernel = 0.0; ///< K(pivot_j, pivot_k), halved when j == k
  Eigen::Index lower = -1;
  Eigen::Index upper = -1;
  double lower_weight = 0.0;
  double upper_weight = 0.0;
  double leak_mass = 0.0;
};

/// Discrete aggregation and fragmentation operators on a fixed grid. Immutable after assembly.
struct OperatorTables {
  Grid grid;
  Matrix coagulation;                       ///< K(pivot_i, pivot_j)
  std::vector<AggregationChannel> channels; ///< nonzero-kernel pairs j >= k
  Matrix fragmentation_gain;                ///< (i, j): fragments at pivot i per unit time per particle at j
  Vector fragmentation_loss;                ///< S(pivot_i)
  Vector fragmentation_leak;                ///< mass per unit time per particle at j lost below x_min

  bool has_coagulation() const { return !channels.empty(); }
  bool has_fragmentation() const { return fragmentation_loss.any(); }
};

struct Rates {
  Vector dconc;
  double leak_mass_rate = 0.0;
};

/// Fixed-pivot tables for a (possibly truncated) kernel system. Breakage gain entries are
/// integrals of b(., pivot_j) against the two-point hat weights, computed by adaptive
/// quadrature; throws ConfigError when a parent's fragments do not carry its mass.
OperatorTables assemble(const KernelSystem& system, const Grid& grid);

/// Tables for a mass-discrete system: `kernel` is K at pivot pairs, `selection` S at pivots
/// and `fragments(i, j)` the number of fragments at pivot i from breaking pivot j.
OperatorTables assemble_discrete(const Matrix& kernel, const Vector& selection, const Matrix& fragments,
                                 const Grid& grid);

/// Rate of change of the concentrations, and the rate at which mass leaves the grid.
Rates apply(const OperatorTables& tables, const Vector& conc);
Rates apply(const OperatorTables& tables, const DensityState& state);

/// Writes the fragmentation gain matrix as CSV (destination pivot rows, source pivot columns).
void write_fragmentation_csv(const OperatorTables& tables, const std::string& path);

} // namespace pbe
