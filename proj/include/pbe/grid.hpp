#pragma once

#include <memory>
#include <vector>

#include <Eigen/Core>

#include "pbe/tabulated.hpp"

namespace pbe {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Sectional mass grid: m cells [boundaries(i), boundaries(i+1)] with one pivot each.
struct Grid {
  Vector boundaries; ///< m + 1 strictly increasing masses
  Vector pivots;     ///< m masses, pivots(i) strictly inside cell i
  double ratio = 0.0; ///< constant boundary ratio for geometric grids, 0 otherwise

  Eigen::Index size() const { return pivots.size(); }
  double x_min() const { return boundaries(0); }
  double x_max() const { return boundaries(boundaries.size() - 1); }
  Vector widths() const { return boundaries.tail(size()) - boundaries.head(size()); }

  bool operator==(const Grid& other) const {
    return boundaries.size() == other.boundaries.size() && boundaries == other.boundaries &&
           pivots == other.pivots;
  }
};

/// Geometric grid on [x_min, x_max] with ratio (x_max/x_min)^{1/m}; pivots are cell geometric means.
Grid build_grid(double x_min, double x_max, int m);

/// Grid with explicit pivots; boundaries are the midpoints between neighbours and the
/// outer boundaries mirror the first and last half-gaps. Pivots {1..M} give unit cells.
Grid grid_from_pivots(const std::vector<double>& pivots);

/// Per-cell number concentrations at time t. `leaked_mass` accumulates mass that left
/// the grid through its lower or upper end since t = 0.
struct DensityState {
  double t = 0.0;
  Vector conc;
  double leaked_mass = 0.0;
};

enum class ProfileKind { zero, exponential, monodisperse, tabulated };

struct InitialProfile {
  ProfileKind kind = ProfileKind::exponential;
  double mean = 1.0;   ///< exponential: f0 = number/mean * exp(-x/mean)
  double number = 1.0;
  int cell = 0;        ///< monodisperse
  double amount = 1.0;
  std::shared_ptr<const Table1D> table; ///< tabulated density, zero outside its range

  static InitialProfile zero();
  static InitialProfile exponential(double mean, double number = 1.0);
  static InitialProfile monodisperse(int cell, double amount);
  static InitialProfile tabulated(std::shared_ptr<const Table1D> table);

  /// Pointwise density; undefined for monodisperse profiles (throws).
  double density(double x) const;
};

/// Projects f0 onto the grid. Each density element is split between its two neighbouring
/// pivots so that both number and mass are preserved; below the first pivot and above the
/// last one the split keeps mass only.
DensityState project_initial(const InitialProfile& profile, const Grid& grid);

/// Number of each cell-averaged density element: conc / width.
Vector density_estimate(const DensityState& state, const Grid& grid);

} // namespace pbe
