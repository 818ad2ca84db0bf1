#include "pbe/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>

#include "pbe/errors.hpp"

namespace pbe {

namespace {

void require_match(const DensityState& s, const Grid& g, const char* what) {
  if (s.conc.size() != g.size()) throw ContractViolation(std::string(what) + ": state does not match the grid");
}

void check_omega_exponents(double r1, double r2) {
  if (!(r1 >= 1.0)) throw ConfigError("omega norm: r1 must be at least 1");
  if (!(r2 > 0.0 && r2 < 1.0)) throw ConfigError("omega norm: r2 must lie in (0,1)");
}

void violate(BoundCheck& c, int index, double ratio, const std::string& detail) {
  if (c.pass) {
    c.pass = false;
    c.first_violation = index;
    c.detail = detail;
  }
  c.worst_ratio = std::max(c.worst_ratio, ratio);
}

std::size_t index_of_time(const RunOutput& run, double t) {
  for (std::size_t i = 0; i < run.times.size(); ++i)
    if (std::abs(run.times[i] - t) <= 1e-12 * std::max(1.0, t)) return i;
  throw ContractViolation("run has no snapshot at the requested time");
}

} // namespace

double moment(const DensityState& state, double order, const Grid& grid) {
  require_match(state, grid, "moment");
  return moment(state.conc, grid.pivots, order);
}

double omega_norm(const DensityState& state, double r1, double r2, const Grid& grid) {
  check_omega_exponents(r1, r2);
  require_match(state, grid, "omega_norm");
  return weighted_l1(state.conc, grid.pivots, r1, r2);
}

double omega_distance(const DensityState& a, const DensityState& b, double r1, double r2, const Grid& grid) {
  check_omega_exponents(r1, r2);
  require_match(a, grid, "omega_distance");
  require_match(b, grid, "omega_distance");
  return weighted_l1(a.conc - b.conc, grid.pivots, r1, r2);
}

MomentReport moment_report(const RunOutput& run, const std::vector<double>& orders) {
  MomentReport r;
  r.orders = orders;
  r.times = run.times;
  for (const auto& s : run.states) {
    std::vector<double> row;
    for (double o : orders) row.push_back(moment(s.conc, run.grid.pivots, o));
    r.values.push_back(std::move(row));
  }
  return r;
}

double mass_ledger_tolerance(const RunOutput& run) { return 10.0 * run.integrator.rel_tol; }

MomentBoundReport check_moment_bounds(const RunOutput& run, const KernelSystem& system) {
  MomentBoundReport rep;
  rep.mass.name = "mass-ledger";
  rep.number.name = "number-growth";
  rep.second_moment.name = "second-moment";
  rep.negative.name = "negative-moment";
  if (run.states.empty()) return rep;

  const auto& mom = run.moments;
  const double N1_0 = mom.front().N1;
  const double tol = mass_ledger_tolerance(run);
  double N0_bar = 0.0, N1_bar = 0.0;
  for (const auto& s : mom) {
    N0_bar = std::max(N0_bar, s.N0);
    N1_bar = std::max(N1_bar, s.N1);
  }
  const double N = system.breakage.N;
  const double S0 = system.selection.form == SelectionForm::zero ? 0.0 : system.selection.S0;
  const double k = system.coagulation.form == CoagulationForm::zero ? 0.0 : system.coagulation.k;
  const double A = k * (N0_bar * N0_bar + 3.0 * N1_bar * N0_bar + 2.0 * N1_bar * N1_bar);
  const double B = 2.0 * k * (N1_bar + N0_bar);
  const double N2_0 = mom.front().N2;

  for (std::size_t i = 0; i < mom.size(); ++i) {
    const double t = run.times[i];
    const int idx = static_cast<int>(i);
    std::ostringstream where;
    where.precision(17);
    where << "snapshot " << i << " (t = " << t << ")";

    const double ledger = mom[i].N1 + run.states[i].leaked_mass - run.clipped_mass[i];
    const double defect = N1_0 > 0.0 ? std::abs(ledger - N1_0) / N1_0 : std::abs(ledger);
    rep.mass.worst_ratio = std::max(rep.mass.worst_ratio, defect / tol);
    if (defect > tol) violate(rep.mass, idx, defect / tol, "mass ledger off by " + std::to_string(defect) + " at " + where.str());

    const double number_bound = (mom.front().N0 + N1_bar) * std::exp(N * S0 * t);
    const double nr = number_bound > 0.0 ? mom[i].N0 / number_bound : 0.0;
    rep.number.worst_ratio = std::max(rep.number.worst_ratio, nr);
    if (mom[i].N0 > number_bound * (1.0 + tol)) violate(rep.number, idx, nr, "N0 above its bound at " + where.str());

    double n2_bound;
    if (B > 0.0) n2_bound = (N2_0 + A / B) * std::exp(B * t) - A / B;
    else n2_bound = N2_0 + A * t;
    const double r2 = n2_bound > 0.0 ? mom[i].N2 / n2_bound : 0.0;
    if (!std::isfinite(mom[i].N2)) violate(rep.second_moment, idx, r2, "N2 not finite at " + where.str());
    rep.second_moment.worst_ratio = std::max(rep.second_moment.worst_ratio, r2);
    if (mom[i].N2 > n2_bound * (1.0 + tol)) violate(rep.second_moment, idx, r2, "N2 above its envelope at " + where.str());

    if (!std::isfinite(mom[i].N_neg_gamma)) violate(rep.negative, idx, 0.0, "N_-gamma not finite at " + where.str());
  }
  return rep;
}

EnvelopeConstants make_envelope_constants(const RunOutput& run, const KernelSystem& system, double X1, double X2) {
  if (!(X1 > 0.0 && X2 > X1)) throw ConfigError("envelope strip must satisfy 0 < X1 < X2");
  EnvelopeConstants c;
  c.X1 = X1;
  c.X2 = X2;
  c.X = std::max(1.0 / X1, X2);
  c.k = system.coagulation.k;
  c.lambda = system.coagulation.lambda;
  c.sigma = system.coagulation.sigma;
  c.b_bar = system.breakage.b_bar;
  c.S0 = system.selection.form == SelectionForm::zero ? 0.0 : system.selection.S0;
  const double order = std::ceil(system.selection.alpha);
  for (const auto& s : run.states) c.moment_bound = std::max(c.moment_bound, moment(s.conc, run.grid.pivots, order));

  double g0 = 0.0;
  const Vector dens = density_estimate(run.states.front(), run.grid);
  for (Eigen::Index i = 0; i < run.grid.size(); ++i) {
    const double x = run.grid.pivots(i);
    if (x >= X1 && x <= X2) g0 = std::max(g0, dens(i) / std::pow(x, c.sigma));
  }
  c.h0 = std::max(g0, std::pow(c.X, c.sigma) * c.S0 * c.b_bar * c.moment_bound);
  return c;
}

double envelope(const EnvelopeConstants& c, double x, double t) {
  const double rate = 0.5 * c.h0 * x * c.k * std::pow(1.0 + c.X, c.lambda) * std::pow(c.X, c.sigma);
  return c.h0 * std::exp(rate * std::expm1(t) + t);
}

EnvelopeVerdict envelope_check(const RunOutput& run, const EnvelopeConstants& constants, double X1, double X2) {
  EnvelopeVerdict v;
  for (std::size_t s = 0; s < run.states.size(); ++s) {
    const double t = run.times[s];
    const Vector dens = density_estimate(run.states[s], run.grid);
    for (Eigen::Index i = 0; i < run.grid.size(); ++i) {
      const double x = run.grid.pivots(i);
      if (x < X1 || x > X2) continue;
      const double g = dens(i) / std::pow(x, constants.sigma);
      const double h = envelope(constants, x, t);
      const double ratio = h > 0.0 ? g / h : (g > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
      ++v.points_checked;
      if (ratio > v.worst_ratio) {
        v.worst_ratio = ratio;
        v.worst_x = x;
        v.worst_t = t;
      }
    }
  }
  v.pass = v.worst_ratio <= 1.0;
  return v;
}

UniquenessExponents choose_uniqueness_exponents(double lambda, double sigma, double alpha, double r2,
                                                std::optional<double> gamma) {
  // 0 <= (lambda - sigma) + k1 <= max{alpha, 1}  and  0 <= sigma - k1 <= r2
  const double lo = std::max(sigma - lambda, sigma - r2);
  const double hi = std::min(std::max(alpha, 1.0) - (lambda - sigma), sigma);
  std::ostringstream os;
  if (lo > hi) {
    os << "k1 interval is empty: [" << std::max(sigma - lambda, sigma - r2) << ", " << hi << "]";
    throw ConfigError(os.str());
  }
  // 0 < k2 <= min{|r2 - sigma|, alpha}
  const double k2_hi = std::min(std::abs(r2 - sigma), alpha);
  if (!(k2_hi > 0.0)) {
    os << "k2 interval (0, " << k2_hi << "] is empty";
    throw ConfigError(os.str());
  }
  UniquenessExponents e;
  e.k1_lo = lo;
  e.k1_hi = hi;
  e.k1 = 0.5 * (lo + hi);
  e.k2 = k2_hi;
  if (gamma) e.k2_exceeds_gamma = e.k2 > *gamma;
  return e;
}

double uniqueness_distance(const DensityState& s1, const DensityState& s2, const UniquenessExponents& exps,
                           const Grid& grid) {
  require_match(s1, grid, "uniqueness_distance");
  require_match(s2, grid, "uniqueness_distance");
  return weighted_l1(s1.conc - s2.conc, grid.pivots, exps.k1, exps.k2);
}

StudyReport truncation_study(const Simulation& base, const std::vector<int>& n_list, double r1, double r2,
                             double ramp) {
  check_omega_exponents(r1, r2);
  for (std::size_t i = 1; i < n_list.size(); ++i)
    if (n_list[i] <= n_list[i - 1]) throw ConfigError("truncation study: n_list must be increasing");

  Simulation reference = base;
  reference.truncation.reset();
  if (reference.snapshot_count % 2 != 0) reference.snapshot_count *= 2; // keep t_end / 2 on the snapshot set

  std::vector<std::future<RunOutput>> jobs;
  jobs.push_back(std::async(std::launch::async, [reference] { return integrate(reference); }));
  for (int n : n_list) {
    Simulation sim = reference;
    sim.truncation = TruncationParams{n, ramp};
    jobs.push_back(std::async(std::launch::async, [sim] { return integrate(sim); }));
  }
  std::vector<RunOutput> runs;
  for (auto& j : jobs) runs.push_back(j.get());

  const double t_end = base.integrator.t_end;
  const std::size_t i_end = index_of_time(runs[0], t_end);
  const std::size_t i_mid = index_of_time(runs[0], 0.5 * t_end);
  const Grid& grid = runs[0].grid;

  StudyReport rep;
  rep.r1 = r1;
  rep.r2 = r2;
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    const RunOutput& r = runs[i + 1];
    rep.entries.push_back({n_list[i], omega_distance(r.states[i_end], runs[0].states[i_end], r1, r2, grid),
                           omega_distance(r.states[i_mid], runs[0].states[i_mid], r1, r2, grid)});
    if (i > 0) {
      const RunOutput& prev = runs[i];
      rep.pairwise_final.push_back(omega_distance(r.states[i_end], prev.states[i_end], r1, r2, grid));
      rep.pairwise_mid.push_back(omega_distance(r.states[i_mid], prev.states[i_mid], r1, r2, grid));
      const double d_prev = rep.entries[i - 1].distance_final, d = rep.entries[i].distance_final;
      if (d > d_prev) rep.nonincreasing = false;
      if (!(d < d_prev)) rep.strictly_decreasing = false;
    }
  }
  return rep;
}

} // namespace pbe
