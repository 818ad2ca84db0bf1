#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pbe/tabulated.hpp"

namespace pbe {

// ---------------------------------------------------------------------------
// Coagulation kernel K(x, y)
// ---------------------------------------------------------------------------

enum class CoagulationForm {
  zero,
  constant,        ///< K = 1
  sum,             ///< K = x + y
  smoluchowski,    ///< K = (x^{1/a} + y^{1/a}) (x^{-1/a} + y^{-1/a})
  eke,             ///< K = (x^{1/3} + y^{1/3})^2 (1/x + 1/y)^{1/2}
  granulation,     ///< K = (x + y) / (x y)^{1/2}
  shear_linear,    ///< K = (x^{1/3} + y^{1/3})^3
  shear_nonlinear, ///< K = (x^{1/3} + y^{1/3})^{7/3}
  custom_tabulated,
  custom,
};

/// A coagulation kernel together with the constants of its growth bound
///   K(x, y) <= k (1 + x + y)^lambda / (x y)^sigma.
struct CoagulationSpec {
  CoagulationForm form = CoagulationForm::constant;
  double k = 1.0;
  double sigma = 0.0;
  double lambda = 0.0;
  double a = 3.0; ///< fractal dimension, smoluchowski only
  std::shared_ptr<const Table2D> table;
  std::function<double(double, double)> custom;

  static CoagulationSpec zero();
  static CoagulationSpec constant();
  static CoagulationSpec sum();
  static CoagulationSpec smoluchowski(double a);
  static CoagulationSpec eke();
  static CoagulationSpec granulation();
  static CoagulationSpec shear_linear();
  static CoagulationSpec shear_nonlinear();
  static CoagulationSpec tabulated(std::shared_ptr<const Table2D> table, double k, double sigma,
                                   double lambda);
  static CoagulationSpec from_function(std::function<double(double, double)> f, double k,
                                       double sigma, double lambda);
};

// ---------------------------------------------------------------------------
// Selection function S(x)
// ---------------------------------------------------------------------------

enum class SelectionForm { zero, constant, power, tabulated, custom };

/// S(x) with the bound S(x) <= S0 x^alpha. For `constant` S = S0, for `power` S = S0 x^alpha.
struct SelectionSpec {
  SelectionForm form = SelectionForm::zero;
  double S0 = 0.0;
  double alpha = 0.0;
  std::shared_ptr<const Table1D> table;
  std::function<double(double)> custom;

  static SelectionSpec zero();
  static SelectionSpec constant(double rate);
  static SelectionSpec power(double S0, double alpha);
  static SelectionSpec tabulated(std::shared_ptr<const Table1D> table, double S0, double alpha);
  static SelectionSpec from_function(std::function<double(double)> f, double S0, double alpha);
};

// ---------------------------------------------------------------------------
// Breakage function b(x, y)
// ---------------------------------------------------------------------------

enum class BreakageForm {
  binary_uniform,  ///< b = 2 / y
  ternary_uniform, ///< b = 6 (y - x) / y^2
  parabolic,       ///< b = 12 x (y - x) / y^3
  custom,
};

/// Fragment distribution with its admissibility constants: fragment-count cap N,
/// negative-moment exponent gamma and constant N0, sup bound b_bar above mass Y.
struct BreakageSpec {
  BreakageForm form = BreakageForm::binary_uniform;
  int N = 2;
  double gamma = 0.5;
  double N0 = 4.0;
  double b_bar = 2.0;
  double Y = 1.0;
  std::function<double(double, double)> custom;

  // N0 is filled in from the closed-form negative moment for the given gamma.
  static BreakageSpec binary_uniform(double gamma = 0.5);
  static BreakageSpec ternary_uniform(double gamma = 0.5);
  static BreakageSpec parabolic(double gamma = 0.5);
  static BreakageSpec from_function(std::function<double(double, double)> f, int N, double gamma,
                                    double N0, double b_bar, double Y);
};

// ---------------------------------------------------------------------------
// Truncation
// ---------------------------------------------------------------------------

/// Cutoff equal to 1 on [1/n, n], 0 outside [ramp/n, n/ramp], linear in log-mass between.
struct TruncationParams {
  int n = 1;
  double ramp = 0.5;

  bool operator==(const TruncationParams&) const = default;
};

double cutoff(const TruncationParams& params, double x);

struct KernelSystem {
  CoagulationSpec coagulation;
  SelectionSpec selection;
  BreakageSpec breakage;
  std::vector<TruncationParams> truncations; ///< applied multiplicatively, empty = untruncated
};

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

/// K(x, y). Exactly symmetric; throws DomainError for nonpositive masses.
double eval_coagulation(const CoagulationSpec& spec, double x, double y);
double eval_selection(const SelectionSpec& spec, double x);
/// b(x, y); zero for x > y.
double eval_breakage(const BreakageSpec& spec, double x, double y);

/// Kernels of a (possibly truncated) system.
double coagulation_rate(const KernelSystem& system, double x, double y);
double selection_rate(const KernelSystem& system, double x);
double breakage_density(const KernelSystem& system, double x, double y);

/// Returns the system with K_n = phi_n(x) phi_n(y) K and S_n = phi_n S.
KernelSystem truncate(const KernelSystem& system, const TruncationParams& params);

/// Parameter-range violations (empty when admissible). Each entry names the field.
std::vector<std::string> constraint_violations(const CoagulationSpec& spec);
std::vector<std::string> constraint_violations(const SelectionSpec& spec);
std::vector<std::string> constraint_violations(const BreakageSpec& spec);
std::vector<std::string> constraint_violations(const TruncationParams& params);
std::vector<std::string> constraint_violations(const KernelSystem& system);

// ---------------------------------------------------------------------------
// Admissibility verifiers (finite sampling on a log grid)
// ---------------------------------------------------------------------------

struct SamplingPlan {
  double lo = 1e-6;
  double hi = 1e6;
  int points = 96; ///< per axis
};

struct CoagulationVerdict {
  bool pass = false;
  double worst_ratio = 0.0; ///< sup of K (xy)^sigma / (k (1+x+y)^lambda)
  double worst_x = 0.0;
  double worst_y = 0.0;
};

struct SelectionVerdict {
  bool pass = false;
  double worst_ratio = 0.0; ///< sup of S / (S0 x^alpha)
  double worst_x = 0.0;
};

struct BreakageReport {
  bool mass_ok = true;
  bool count_ok = true;
  bool gamma_ok = true;
  bool sup_ok = true;
  double worst_mass_error = 0.0; ///< relative
  double worst_mass_y = 0.0;
  double max_fragment_count = 0.0;
  double worst_gamma_ratio = 0.0; ///< sup of y^gamma * int x^{-gamma} b / N0
  double max_sup = 0.0;

  bool all_ok() const { return mass_ok && count_ok && gamma_ok && sup_ok; }
};

CoagulationVerdict verify_coagulation_bound(const CoagulationSpec& spec, const SamplingPlan& plan = {});
SelectionVerdict verify_selection_bound(const SelectionSpec& spec, const SamplingPlan& plan = {});

/// Default parent-mass samples for verify_breakage: 25 log-spaced points on [1e-3, 1e3].
std::vector<double> default_breakage_samples();
BreakageReport verify_breakage(const BreakageSpec& spec,
                               const std::vector<double>& y_samples = default_breakage_samples());

struct SystemVerdict {
  CoagulationVerdict coagulation;
  SelectionVerdict selection;
  BreakageReport breakage;
  bool gamma_above_sigma = false; ///< sigma < gamma < 1

  bool all_ok() const {
    return coagulation.pass && selection.pass && breakage.all_ok() && gamma_above_sigma;
  }
};

SystemVerdict verify_system(const KernelSystem& system);

std::string to_string(CoagulationForm form);
std::string to_string(SelectionForm form);
std::string to_string(BreakageForm form);
std::optional<CoagulationForm> parse_coagulation_form(const std::string& s);
std::optional<SelectionForm> parse_selection_form(const std::string& s);
std::optional<BreakageForm> parse_breakage_form(const std::string& s);

} // namespace pbe
