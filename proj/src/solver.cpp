#include "pbe/solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "pbe/errors.hpp"
#include "pbe/moments.hpp"

namespace pbe {

namespace {

// Dormand-Prince 5(4) tableau
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                 a65 = -5103.0 / 18656.0;
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0, b5 = -2187.0 / 6784.0,
                 b6 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                 e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

constexpr double kSafety = 0.9;
constexpr double kMinShrink = 0.2;

// State extended with the leak accumulator as its last component.
Vector extended_rate(const OperatorTables& tables, const Vector& y) {
  const Eigen::Index m = tables.grid.size();
  const Rates r = apply(tables, Vector(y.head(m)));
  Vector out(m + 1);
  out.head(m) = r.dconc;
  out(m) = r.leak_mass_rate;
  return out;
}

MomentSample sample_moments(const DensityState& s, const Grid& g, double gamma) {
  return {moment(s.conc, g.pivots, 0.0), moment(s.conc, g.pivots, 1.0), moment(s.conc, g.pivots, 2.0),
          moment(s.conc, g.pivots, -gamma)};
}

} // namespace

std::vector<std::string> constraint_violations(const IntegratorConfig& cfg) {
  std::vector<std::string> v;
  if (!(cfg.rel_tol > 0.0)) v.emplace_back("rel_tol must be positive");
  if (!(cfg.abs_tol > 0.0)) v.emplace_back("abs_tol must be positive");
  if (!(cfg.dt_init > 0.0)) v.emplace_back("dt_init must be positive");
  if (!(cfg.dt_max > 0.0)) v.emplace_back("dt_max must be positive");
  if (!(cfg.dt_init <= cfg.dt_max)) v.emplace_back("dt_init must not exceed dt_max");
  if (!(cfg.t_end > 0.0)) v.emplace_back("t_end must be positive");
  return v;
}

StepResult step(const DensityState& state, const OperatorTables& tables, double dt,
                const IntegratorConfig& cfg) {
  const Eigen::Index m = tables.grid.size();
  if (state.conc.size() != m) throw ContractViolation("step: state dimension does not match the grid");
  if (!(dt > 0.0)) throw ContractViolation("step: dt must be positive");
  if (dt < 1e-14 * cfg.t_end) {
    std::ostringstream os;
    os << "step size " << dt << " underflowed at t = " << state.t << " (stiff system?)";
    throw StiffnessError(os.str());
  }

  Vector y(m + 1);
  y.head(m) = state.conc;
  y(m) = state.leaked_mass;

  const Vector k1 = extended_rate(tables, y);
  const Vector k2 = extended_rate(tables, y + dt * (a21 * k1));
  const Vector k3 = extended_rate(tables, y + dt * (a31 * k1 + a32 * k2));
  const Vector k4 = extended_rate(tables, y + dt * (a41 * k1 + a42 * k2 + a43 * k3));
  const Vector k5 = extended_rate(tables, y + dt * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
  const Vector k6 = extended_rate(tables, y + dt * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
  Vector y_new = y + dt * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
  const Vector k7 = extended_rate(tables, y_new);
  const Vector err = dt * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

  const Vector scale =
      (cfg.abs_tol + cfg.rel_tol * y.cwiseAbs().cwiseMax(y_new.cwiseAbs()).array()).matrix();
  const double err_norm = std::sqrt(err.cwiseQuotient(scale).squaredNorm() / static_cast<double>(m + 1));

  StepResult out;
  out.error_norm = err_norm;
  if (!std::isfinite(err_norm) || err_norm > 1.0) {
    const double shrink = std::isfinite(err_norm) ? std::max(kMinShrink, kSafety * std::pow(err_norm, -0.2)) : kMinShrink;
    out.state = state;
    out.dt_next = dt * shrink;
    return out;
  }
  if ((y_new.head(m).array() < -cfg.abs_tol).any()) {
    out.state = state;
    out.dt_next = 0.5 * dt;
    return out;
  }

  const Vector& p = tables.grid.pivots;
  for (Eigen::Index i = 0; i < m; ++i)
    if (y_new(i) < 0.0) {
      out.clipped_mass -= p(i) * y_new(i);
      y_new(i) = 0.0;
    }

  out.accepted = true;
  out.state.t = state.t + dt;
  out.state.conc = y_new.head(m);
  out.state.leaked_mass = y_new(m);
  const double growth = err_norm == 0.0 ? kStepGrowth : std::min(kStepGrowth, kSafety * std::pow(err_norm, -0.2));
  out.dt_next = std::min(growth * dt, cfg.dt_max);
  return out;
}

std::vector<double> uniform_snapshots(double t_end, int count) {
  if (count < 1) throw ConfigError("snapshot count must be at least 1");
  std::vector<double> t(count + 1);
  for (int k = 0; k <= count; ++k) t[k] = t_end * k / count;
  t.back() = t_end;
  return t;
}

RunOutput integrate(const OperatorTables& tables, const DensityState& initial, const IntegratorConfig& cfg,
                    const std::vector<double>& snapshot_times, double gamma) {
  if (const auto bad = constraint_violations(cfg); !bad.empty()) throw ConfigError("integrator: " + bad.front());
  if (snapshot_times.empty() || snapshot_times.front() != initial.t || snapshot_times.back() != cfg.t_end)
    throw ContractViolation("snapshot times must run from the initial time to t_end");
  for (std::size_t i = 1; i < snapshot_times.size(); ++i)
    if (!(snapshot_times[i] > snapshot_times[i - 1]))
      throw ContractViolation("snapshot times must be strictly increasing");
  if (initial.conc.size() != tables.grid.size()) throw ContractViolation("initial state does not match the grid");
  if ((initial.conc.array() < 0.0).any()) throw ContractViolation("initial state has negative components");

  RunOutput run;
  run.grid = tables.grid;
  run.integrator = cfg;
  run.gamma = gamma;
  DensityState state = initial;
  double clipped = 0.0;
  auto record = [&](double t) {
    state.t = t;
    run.times.push_back(t);
    run.states.push_back(state);
    run.moments.push_back(sample_moments(state, tables.grid, gamma));
    run.clipped_mass.push_back(clipped);
  };
  record(snapshot_times.front());

  const bool idle = !tables.has_coagulation() && !tables.has_fragmentation();
  double dt = cfg.dt_init;
  for (std::size_t s = 1; s < snapshot_times.size(); ++s) {
    const double target = snapshot_times[s];
    if (idle) { // zero operators: the state is a fixed point
      record(target);
      continue;
    }
    while (state.t < target) {
      const double remaining = target - state.t;
      // stretch onto the target instead of leaving a sliver behind
      const bool clamped = dt * 1.01 >= remaining;
      const double h = clamped ? remaining : dt;
      StepResult r = step(state, tables, h, cfg);
      if (!r.accepted) {
        ++run.rejected_steps;
        dt = r.dt_next;
        continue;
      }
      ++run.accepted_steps;
      run.step_sizes.push_back(h);
      clipped += r.clipped_mass;
      state = std::move(r.state);
      if (clamped) {
        state.t = target;
        dt = std::min(cfg.dt_max, std::max(dt, r.dt_next));
      } else {
        dt = r.dt_next;
      }
    }
    record(target);
  }
  if (clipped > 0.0) run.flags.emplace_back("negative components clipped");
  return run;
}

KernelSystem effective_system(const Simulation& sim) {
  return sim.truncation ? truncate(sim.system, *sim.truncation) : sim.system;
}

RunOutput integrate(const Simulation& sim) {
  std::vector<std::string> bad = constraint_violations(sim.system);
  for (auto& s : constraint_violations(sim.integrator)) bad.push_back("integrator: " + s);
  if (sim.truncation)
    for (auto& s : constraint_violations(*sim.truncation)) bad.push_back("truncation: " + s);
  if (!bad.empty()) {
    std::string msg = "invalid simulation:";
    for (const auto& s : bad) msg += "\n  " + s;
    throw ConfigError(msg);
  }
  std::vector<std::string> warnings;
  const SystemVerdict verdict = verify_system(sim.system);
  if (!verdict.all_ok()) {
    std::string msg = "kernel system failed verification:";
    if (!verdict.coagulation.pass) msg += " coagulation-bound";
    if (!verdict.selection.pass) msg += " selection-bound";
    if (!verdict.breakage.mass_ok) msg += " breakage-mass";
    if (!verdict.breakage.count_ok) msg += " breakage-count";
    if (!verdict.breakage.gamma_ok) msg += " breakage-negative-moment";
    if (!verdict.breakage.sup_ok) msg += " breakage-sup";
    if (!verdict.gamma_above_sigma) msg += " gamma-above-sigma";
    if (sim.strict) throw ConfigError(msg);
    warnings.push_back(msg);
  }

  const Grid grid = build_grid(sim.grid.x_min, sim.grid.x_max, sim.grid.cells);
  const OperatorTables tables = assemble(effective_system(sim), grid);
  const DensityState initial = project_initial(sim.initial, grid);
  RunOutput run = integrate(tables, initial, sim.integrator, uniform_snapshots(sim.integrator.t_end, sim.snapshot_count),
                            sim.system.breakage.gamma);
  run.flags.insert(run.flags.end(), warnings.begin(), warnings.end());
  return run;
}

} // namespace pbe
