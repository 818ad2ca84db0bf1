#include "pbe/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pbe/errors.hpp"
#include "pbe/quadrature.hpp"

namespace pbe {

namespace {

constexpr double kRoundoffSlack = 1e-12;

std::string point_str(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

std::string point_str(double x, double y) { return "(" + point_str(x) + ", " + point_str(y) + ")"; }

void require_positive_mass(double x, const char* what) {
  if (!(x > 0.0)) throw DomainError(std::string(what) + ": mass must be positive, got " + point_str(x));
}

std::vector<double> log_samples(double lo, double hi, int points) {
  std::vector<double> xs(points);
  const double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < points; ++i)
    xs[i] = points == 1 ? lo : std::exp(llo + (lhi - llo) * i / (points - 1));
  return xs;
}

double raw_coagulation(const CoagulationSpec& spec, double x, double y) {
  switch (spec.form) {
  case CoagulationForm::zero:
    return 0.0;
  case CoagulationForm::constant:
    return 1.0;
  case CoagulationForm::sum:
    return x + y;
  case CoagulationForm::smoluchowski: {
    const double s = 1.0 / spec.a;
    const double xs = std::pow(x, s), ys = std::pow(y, s);
    return (xs + ys) * (1.0 / xs + 1.0 / ys);
  }
  case CoagulationForm::eke: {
    const double c = std::cbrt(x) + std::cbrt(y);
    return c * c * std::sqrt(1.0 / x + 1.0 / y);
  }
  case CoagulationForm::granulation:
    return (x + y) / std::sqrt(x * y);
  case CoagulationForm::shear_linear: {
    const double c = std::cbrt(x) + std::cbrt(y);
    return c * c * c;
  }
  case CoagulationForm::shear_nonlinear:
    return std::pow(std::cbrt(x) + std::cbrt(y), 7.0 / 3.0);
  case CoagulationForm::custom_tabulated:
    if (!spec.table) throw ConfigError("custom-tabulated coagulation kernel has no table");
    return (*spec.table)(x, y);
  case CoagulationForm::custom:
    if (!spec.custom) throw ConfigError("custom coagulation kernel has no evaluator");
    return spec.custom(x, y);
  }
  return 0.0;
}

} // namespace

// --- catalog ----------------------------------------------------------------

CoagulationSpec CoagulationSpec::zero() { return {CoagulationForm::zero, 1.0, 0.0, 0.0}; }
CoagulationSpec CoagulationSpec::constant() { return {CoagulationForm::constant, 1.0, 0.0, 0.0}; }
CoagulationSpec CoagulationSpec::sum() { return {CoagulationForm::sum, 1.0, 0.0, 1.0}; }

CoagulationSpec CoagulationSpec::smoluchowski(double a) {
  // K (xy)^{1/a} = 2 (xy)^{1/a} + x^{2/a} + y^{2/a} <= 4 (1+x+y)^{2/a}
  CoagulationSpec s{CoagulationForm::smoluchowski, 4.0, 1.0 / a, 2.0 / a};
  s.a = a;
  return s;
}

CoagulationSpec CoagulationSpec::eke() { return {CoagulationForm::eke, 4.0, 0.5, 7.0 / 6.0}; }
CoagulationSpec CoagulationSpec::granulation() { return {CoagulationForm::granulation, 1.0, 0.5, 1.0}; }
CoagulationSpec CoagulationSpec::shear_linear() { return {CoagulationForm::shear_linear, 8.0, 0.0, 1.0}; }

CoagulationSpec CoagulationSpec::shear_nonlinear() {
  return {CoagulationForm::shear_nonlinear, std::pow(2.0, 7.0 / 3.0), 0.0, 7.0 / 9.0};
}

CoagulationSpec CoagulationSpec::tabulated(std::shared_ptr<const Table2D> table, double k,
                                           double sigma, double lambda) {
  CoagulationSpec s{CoagulationForm::custom_tabulated, k, sigma, lambda};
  s.table = std::move(table);
  return s;
}

CoagulationSpec CoagulationSpec::from_function(std::function<double(double, double)> f, double k,
                                               double sigma, double lambda) {
  CoagulationSpec s{CoagulationForm::custom, k, sigma, lambda};
  s.custom = std::move(f);
  return s;
}

SelectionSpec SelectionSpec::zero() { return {SelectionForm::zero, 0.0, 0.0}; }
SelectionSpec SelectionSpec::constant(double rate) { return {SelectionForm::constant, rate, 0.0}; }
SelectionSpec SelectionSpec::power(double S0, double alpha) { return {SelectionForm::power, S0, alpha}; }

SelectionSpec SelectionSpec::tabulated(std::shared_ptr<const Table1D> table, double S0, double alpha) {
  SelectionSpec s{SelectionForm::tabulated, S0, alpha};
  s.table = std::move(table);
  return s;
}

SelectionSpec SelectionSpec::from_function(std::function<double(double)> f, double S0, double alpha) {
  SelectionSpec s{SelectionForm::custom, S0, alpha};
  s.custom = std::move(f);
  return s;
}

BreakageSpec BreakageSpec::binary_uniform(double gamma) {
  return {BreakageForm::binary_uniform, 2, gamma, 2.0 / (1.0 - gamma), 2.0, 1.0};
}

BreakageSpec BreakageSpec::ternary_uniform(double gamma) {
  return {BreakageForm::ternary_uniform, 3, gamma, 6.0 / ((1.0 - gamma) * (2.0 - gamma)), 6.0, 1.0};
}

BreakageSpec BreakageSpec::parabolic(double gamma) {
  return {BreakageForm::parabolic, 2, gamma, 12.0 / ((2.0 - gamma) * (3.0 - gamma)), 3.0, 1.0};
}

BreakageSpec BreakageSpec::from_function(std::function<double(double, double)> f, int N,
                                         double gamma, double N0, double b_bar, double Y) {
  BreakageSpec s{BreakageForm::custom, N, gamma, N0, b_bar, Y};
  s.custom = std::move(f);
  return s;
}

// --- evaluation -------------------------------------------------------------

double eval_coagulation(const CoagulationSpec& spec, double x, double y) {
  require_positive_mass(x, "coagulation kernel");
  require_positive_mass(y, "coagulation kernel");
  if (x > y) std::swap(x, y);
  return raw_coagulation(spec, x, y);
}

double eval_selection(const SelectionSpec& spec, double x) {
  require_positive_mass(x, "selection function");
  switch (spec.form) {
  case SelectionForm::zero:
    return 0.0;
  case SelectionForm::constant:
    return spec.S0;
  case SelectionForm::power:
    return spec.alpha == 1.0 ? spec.S0 * x : spec.S0 * std::pow(x, spec.alpha);
  case SelectionForm::tabulated:
    if (!spec.table) throw ConfigError("tabulated selection function has no table");
    return (*spec.table)(x);
  case SelectionForm::custom:
    if (!spec.custom) throw ConfigError("custom selection function has no evaluator");
    return spec.custom(x);
  }
  return 0.0;
}

double eval_breakage(const BreakageSpec& spec, double x, double y) {
  require_positive_mass(x, "breakage function");
  require_positive_mass(y, "breakage function");
  if (x > y) return 0.0;
  switch (spec.form) {
  case BreakageForm::binary_uniform:
    return 2.0 / y;
  case BreakageForm::ternary_uniform:
    return 6.0 * (y - x) / (y * y);
  case BreakageForm::parabolic:
    return 12.0 * x * (y - x) / (y * y * y);
  case BreakageForm::custom:
    if (!spec.custom) throw ConfigError("custom breakage function has no evaluator");
    return spec.custom(x, y);
  }
  return 0.0;
}

double cutoff(const TruncationParams& params, double x) {
  const double n = params.n;
  const double lo_core = 1.0 / n, hi_core = n;
  if (x >= lo_core && x <= hi_core) return 1.0;
  const double lo_out = params.ramp / n, hi_out = n / params.ramp;
  if (x <= lo_out || x >= hi_out) return 0.0;
  const double width = -std::log(params.ramp);
  if (x < lo_core) return std::log(x / lo_out) / width;
  return std::log(hi_out / x) / width;
}

double coagulation_rate(const KernelSystem& system, double x, double y) {
  double phi = 1.0;
  for (const auto& t : system.truncations) phi *= cutoff(t, x) * cutoff(t, y);
  if (phi == 0.0) {
    require_positive_mass(x, "coagulation kernel");
    require_positive_mass(y, "coagulation kernel");
    return 0.0;
  }
  return phi * eval_coagulation(system.coagulation, x, y);
}

double selection_rate(const KernelSystem& system, double x) {
  double phi = 1.0;
  for (const auto& t : system.truncations) phi *= cutoff(t, x);
  if (phi == 0.0) {
    require_positive_mass(x, "selection function");
    return 0.0;
  }
  return phi * eval_selection(system.selection, x);
}

double breakage_density(const KernelSystem& system, double x, double y) {
  return eval_breakage(system.breakage, x, y);
}

KernelSystem truncate(const KernelSystem& system, const TruncationParams& params) {
  const auto bad = constraint_violations(params);
  if (!bad.empty()) throw ConfigError(bad.front());
  KernelSystem out = system;
  out.truncations.push_back(params);
  return out;
}

// --- constraints ------------------------------------------------------------

std::vector<std::string> constraint_violations(const CoagulationSpec& spec) {
  std::vector<std::string> v;
  if (!(spec.k > 0.0)) v.emplace_back("k must be positive");
  if (!(spec.sigma >= 0.0 && spec.sigma < 1.0)) v.emplace_back("sigma must lie in [0,1)");
  const double growth = spec.lambda - spec.sigma;
  if (!(growth >= 0.0 && growth <= 1.0)) v.emplace_back("lambda - sigma must lie in [0,1]");
  if (spec.form == CoagulationForm::smoluchowski && !(spec.a > 1.0))
    v.emplace_back("a must exceed 1 so that 1/a lies in (0,1)");
  if (spec.form == CoagulationForm::custom_tabulated) {
    if (!spec.table) v.emplace_back("table is required for custom-tabulated kernels");
    else if (spec.table->min_value() < 0.0) v.emplace_back("table contains negative kernel values");
  }
  if (spec.form == CoagulationForm::custom && !spec.custom)
    v.emplace_back("evaluator is required for custom kernels");
  return v;
}

std::vector<std::string> constraint_violations(const SelectionSpec& spec) {
  std::vector<std::string> v;
  if (!(spec.S0 >= 0.0)) v.emplace_back("S0 must be nonnegative");
  if (!(spec.alpha >= 0.0 && spec.alpha <= 1.0)) v.emplace_back("alpha must lie in [0,1]");
  if (spec.form == SelectionForm::tabulated) {
    if (!spec.table) v.emplace_back("table is required for tabulated selection functions");
    else if (spec.table->min_value() < 0.0) v.emplace_back("table contains negative selection rates");
  }
  if (spec.form == SelectionForm::custom && !spec.custom)
    v.emplace_back("evaluator is required for custom selection functions");
  return v;
}

std::vector<std::string> constraint_violations(const BreakageSpec& spec) {
  std::vector<std::string> v;
  if (spec.N < 2) v.emplace_back("N must be at least 2");
  if (!(spec.gamma > 0.0 && spec.gamma < 1.0)) v.emplace_back("gamma must lie in (0,1)");
  if (!(spec.N0 > 0.0)) v.emplace_back("N0 must be positive");
  if (!(spec.b_bar > 0.0)) v.emplace_back("b_bar must be positive");
  if (!(spec.Y > 0.0)) v.emplace_back("Y must be positive");
  if (spec.form == BreakageForm::custom && !spec.custom)
    v.emplace_back("evaluator is required for custom breakage functions");
  return v;
}

std::vector<std::string> constraint_violations(const TruncationParams& params) {
  std::vector<std::string> v;
  if (params.n < 1) v.emplace_back("n must be at least 1");
  if (!(params.ramp > 0.0 && params.ramp < 1.0)) v.emplace_back("ramp must lie in (0,1)");
  return v;
}

std::vector<std::string> constraint_violations(const KernelSystem& system) {
  std::vector<std::string> v;
  for (auto& s : constraint_violations(system.coagulation)) v.push_back("coagulation: " + s);
  for (auto& s : constraint_violations(system.selection)) v.push_back("selection: " + s);
  for (auto& s : constraint_violations(system.breakage)) v.push_back("breakage: " + s);
  if (!(system.breakage.gamma > system.coagulation.sigma))
    v.emplace_back("breakage: gamma must exceed the coagulation sigma");
  for (const auto& t : system.truncations)
    for (auto& s : constraint_violations(t)) v.push_back("truncation: " + s);
  return v;
}

// --- verifiers --------------------------------------------------------------

CoagulationVerdict verify_coagulation_bound(const CoagulationSpec& spec, const SamplingPlan& plan) {
  if (plan.points < 64) throw ConfigError("coagulation sampling plan needs at least 64 points per axis");
  const auto xs = log_samples(plan.lo, plan.hi, plan.points);
  CoagulationVerdict out;
  out.worst_ratio = -std::numeric_limits<double>::infinity();
  for (double x : xs)
    for (double y : xs) {
      double K = 0.0;
      try {
        K = eval_coagulation(spec, x, y);
      } catch (const std::exception& e) {
        throw DomainError("coagulation kernel failed at " + point_str(x, y) + ": " + e.what());
      }
      if (!std::isfinite(K) || K < 0.0)
        throw DomainError("coagulation kernel is negative or non-finite at " + point_str(x, y));
      const double ratio = K * std::pow(x * y, spec.sigma) / std::pow(1.0 + x + y, spec.lambda);
      if (ratio > out.worst_ratio) {
        out.worst_ratio = ratio;
        out.worst_x = x;
        out.worst_y = y;
      }
    }
  out.pass = out.worst_ratio <= spec.k * (1.0 + kRoundoffSlack);
  return out;
}

SelectionVerdict verify_selection_bound(const SelectionSpec& spec, const SamplingPlan& plan) {
  const auto xs = log_samples(plan.lo, plan.hi, std::max(plan.points, 64));
  SelectionVerdict out;
  out.worst_ratio = -std::numeric_limits<double>::infinity();
  for (double x : xs) {
    double S = 0.0;
    try {
      S = eval_selection(spec, x);
    } catch (const std::exception& e) {
      throw DomainError("selection function failed at " + point_str(x) + ": " + e.what());
    }
    if (!std::isfinite(S) || S < 0.0)
      throw DomainError("selection function is negative or non-finite at " + point_str(x));
    const double bound = spec.S0 * std::pow(x, spec.alpha);
    const double ratio = bound > 0.0 ? S / bound : (S == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    if (ratio > out.worst_ratio) {
      out.worst_ratio = ratio;
      out.worst_x = x;
    }
  }
  out.pass = out.worst_ratio <= 1.0 + kRoundoffSlack;
  return out;
}

std::vector<double> default_breakage_samples() { return log_samples(1e-3, 1e3, 25); }

namespace {

// Integral over [0, y]: graded composite Gauss on the singular half, Gauss-Kronrod on the rest.
double fragment_integral(const std::function<double(double)>& g, double y, double singularity,
                         const char* what) {
  const auto left = quad::integrate_left_singular(g, 0.0, 0.5 * y, singularity, 1e-13);
  const auto right = quad::integrate(g, 0.5 * y, y, 1e-13, 1e-300);
  if (!left.converged || !right.converged)
    throw QuadratureError(std::string("breakage ") + what + " integral did not converge at y = " +
                          point_str(y));
  return left.value + right.value;
}

} // namespace

BreakageReport verify_breakage(const BreakageSpec& spec, const std::vector<double>& y_samples) {
  BreakageReport r;
  const double g = spec.gamma;
  for (double y : y_samples) {
    if (!(y > 0.0)) throw DomainError("breakage sample mass must be positive");
    auto b = [&](double x) { return x > 0.0 ? eval_breakage(spec, x, y) : 0.0; };
    const double mass = fragment_integral([&](double x) { return x * b(x); }, y, g, "mass");
    const double count = fragment_integral(b, y, g, "count");
    const double neg = fragment_integral(
        [&](double x) { return x > 0.0 ? std::pow(x, -g) * b(x) : 0.0; }, y, g, "negative-moment");

    const double mass_err = std::abs(mass - y) / y;
    if (mass_err > r.worst_mass_error) {
      r.worst_mass_error = mass_err;
      r.worst_mass_y = y;
    }
    r.max_fragment_count = std::max(r.max_fragment_count, count);
    r.worst_gamma_ratio = std::max(r.worst_gamma_ratio, neg * std::pow(y, g) / spec.N0);
  }
  r.mass_ok = r.worst_mass_error <= 1e-8;
  r.count_ok = r.max_fragment_count <= spec.N * (1.0 + 1e-8);
  r.gamma_ok = r.worst_gamma_ratio <= 1.0 + 1e-8;

  // Condition on the sup of b over windows [x1, x2] for parents heavier than Y.
  // The window family is fixed: decades from 1e-4 up to the parent mass.
  for (double y : y_samples) {
    if (!(y > spec.Y)) continue;
    for (int e = -4; e < 6; ++e) {
      const double x1 = std::pow(10.0, e);
      if (x1 >= y) break;
      const double x2 = std::min(10.0 * x1, y);
      for (double x : log_samples(x1, x2, 32)) r.max_sup = std::max(r.max_sup, eval_breakage(spec, x, y));
    }
  }
  r.sup_ok = r.max_sup <= spec.b_bar * (1.0 + kRoundoffSlack);
  return r;
}

SystemVerdict verify_system(const KernelSystem& system) {
  SystemVerdict v;
  v.coagulation = verify_coagulation_bound(system.coagulation);
  v.selection = verify_selection_bound(system.selection);
  v.breakage = verify_breakage(system.breakage);
  v.gamma_above_sigma = system.breakage.gamma > system.coagulation.sigma && system.breakage.gamma < 1.0;
  return v;
}

// --- names ------------------------------------------------------------------

std::string to_string(CoagulationForm form) {
  switch (form) {
  case CoagulationForm::zero: return "zero";
  case CoagulationForm::constant: return "constant";
  case CoagulationForm::sum: return "sum";
  case CoagulationForm::smoluchowski: return "smoluchowski";
  case CoagulationForm::eke: return "eke";
  case CoagulationForm::granulation: return "granulation";
  case CoagulationForm::shear_linear: return "shear-linear";
  case CoagulationForm::shear_nonlinear: return "shear-nonlinear";
  case CoagulationForm::custom_tabulated: return "custom-tabulated";
  case CoagulationForm::custom: return "custom";
  }
  return "?";
}

std::string to_string(SelectionForm form) {
  switch (form) {
  case SelectionForm::zero: return "zero";
  case SelectionForm::constant: return "constant";
  case SelectionForm::power: return "power";
  case SelectionForm::tabulated: return "tabulated";
  case SelectionForm::custom: return "custom";
  }
  return "?";
}

std::string to_string(BreakageForm form) {
  switch (form) {
  case BreakageForm::binary_uniform: return "binary-uniform";
  case BreakageForm::ternary_uniform: return "ternary-uniform";
  case BreakageForm::parabolic: return "parabolic";
  case BreakageForm::custom: return "custom";
  }
  return "?";
}

std::optional<CoagulationForm> parse_coagulation_form(const std::string& s) {
  for (auto f : {CoagulationForm::zero, CoagulationForm::constant, CoagulationForm::sum,
                 CoagulationForm::smoluchowski, CoagulationForm::eke, CoagulationForm::granulation,
                 CoagulationForm::shear_linear, CoagulationForm::shear_nonlinear,
                 CoagulationForm::custom_tabulated, CoagulationForm::custom})
    if (to_string(f) == s) return f;
  return std::nullopt;
}

std::optional<SelectionForm> parse_selection_form(const std::string& s) {
  for (auto f : {SelectionForm::zero, SelectionForm::constant, SelectionForm::power,
                 SelectionForm::tabulated, SelectionForm::custom})
    if (to_string(f) == s) return f;
  return std::nullopt;
}

std::optional<BreakageForm> parse_breakage_form(const std::string& s) {
  for (auto f : {BreakageForm::binary_uniform, BreakageForm::ternary_uniform, BreakageForm::parabolic,
                 BreakageForm::custom})
    if (to_string(f) == s) return f;
  return std::nullopt;
}

} // namespace pbe
