// Acceptance suite: one line per criterion, nonzero exit when any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "pbe/analysis.hpp"
#include "pbe/errors.hpp"
#include "pbe/operators.hpp"
#include "pbe/oracles.hpp"
#include "pbe/solver.hpp"

using namespace pbe;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Simulation mass_benchmark() {
  Simulation s;
  s.system = {CoagulationSpec::smoluchowski(3.0), SelectionSpec::power(1.0, 1.0), BreakageSpec::binary_uniform(0.5), {}};
  s.grid = {1e-6, 1e3, 180};
  s.initial = InitialProfile::exponential(1.0);
  s.integrator.t_end = 1.0;
  s.snapshot_count = 10;
  return s;
}

Simulation constant_benchmark() {
  Simulation s;
  s.system = {CoagulationSpec::constant(), SelectionSpec::zero(), BreakageSpec::binary_uniform(), {}};
  s.grid = {1e-6, 1e3, 180};
  s.integrator.t_end = 1.0;
  s.snapshot_count = 10;
  return s;
}

Outcome mass_conservation() {
  const RunOutput run = integrate(mass_benchmark());
  const double m0 = run.moments.front().N1;
  double worst = 0.0;
  for (std::size_t i = 0; i < run.times.size(); ++i) {
    const double drift = std::abs(run.moments[i].N1 - m0) / m0;
    const double ledger = std::abs(run.moments[i].N1 + run.states[i].leaked_mass - run.clipped_mass[i] - m0) / m0;
    worst = std::max(worst, drift + ledger);
  }
  return {worst <= 1e-4, "max drift + ledger defect " + fmt("%.3e", worst) + " (limit 1e-4)"};
}

Outcome constant_kernel_oracle() {
  const RunOutput run = integrate(constant_benchmark());
  const Grid& g = run.grid;
  const Vector w = g.widths();
  double l1 = 0.0, n0 = 0.0;
  for (std::size_t i = 0; i < run.times.size(); ++i) {
    const double t = run.times[i];
    double e = 0.0;
    for (Eigen::Index c = 0; c < g.size(); ++c)
      e += std::abs(run.states[i].conc(c) - w(c) * oracle::constant_kernel_solution(g.pivots(c), t));
    l1 = std::max(l1, e);
    n0 = std::max(n0, std::abs(run.moments[i].N0 / (2.0 / (2.0 + t)) - 1.0));
  }
  return {l1 <= 1e-2 && n0 <= 1e-3,
          "max L1 " + fmt("%.3e", l1) + " (limit 1e-2), max N0 rel error " + fmt("%.3e", n0) + " (limit 1e-3)"};
}

Outcome fragmentation_growth() {
  Simulation s;
  s.system = {CoagulationSpec::zero(), SelectionSpec::constant(1.0), BreakageSpec::binary_uniform(), {}};
  s.grid = {1e-12, 1e3, 240};
  s.integrator.t_end = 2.0;
  s.snapshot_count = 20;
  const RunOutput run = integrate(s);
  const double n0 = run.moments.front().N0;
  double worst = 0.0;
  for (std::size_t i = 0; i < run.times.size(); ++i)
    worst = std::max(worst, std::abs(run.moments[i].N0 / n0 / std::exp(run.times[i]) - 1.0));
  const auto bounds = check_moment_bounds(run, s.system);
  return {worst <= 1e-4 && bounds.number.pass,
          "max |N0/N0(0) e^-t - 1| " + fmt("%.3e", worst) + " (limit 1e-4), number bound " +
              (bounds.number.pass ? "held" : "violated") + ", worst ratio " + fmt("%.4f", bounds.number.worst_ratio)};
}

Outcome truncation_convergence() {
  const StudyReport rep = truncation_study(mass_benchmark(), {4, 16, 64, 256}, 2.0, 0.5);
  std::string d;
  for (const auto& e : rep.entries) d += (d.empty() ? "" : ", ") + fmt("%.3e", e.distance_final);
  const double final_distance = rep.entries.back().distance_final;
  return {rep.strictly_decreasing && final_distance <= 1e-3,
          std::string("distances [") + d + "], strictly decreasing " + (rep.strictly_decreasing ? "yes" : "no") +
              ", final " + fmt("%.3e", final_distance) + " (limit 1e-3)"};
}

Outcome envelope_bound() {
  const Simulation s = constant_benchmark();
  const RunOutput run = integrate(s);
  const auto c = make_envelope_constants(run, s.system, 0.1, 10.0);
  const auto v = envelope_check(run, c, 0.1, 10.0);
  return {v.pass, "max g/h " + fmt("%.4f", v.worst_ratio) + " over " + std::to_string(v.points_checked) + " points"};
}

Outcome verifier_discrimination() {
  bool ok = true;
  std::string why;
  for (const auto& spec : {CoagulationSpec::constant(), CoagulationSpec::sum(), CoagulationSpec::smoluchowski(3.0)})
    if (!verify_coagulation_bound(spec).pass) {
      ok = false;
      why += " " + to_string(spec.form) + " rejected;";
    }
  int rejected = 0, tried = 0;
  for (double sigma : {0.0, 0.25, 0.5, 0.75})
    for (auto [k, excess] : {std::pair{1.0, 0.0}, std::pair{10.0, 0.5}, std::pair{100.0, 1.0}, std::pair{1e4, 1.0}}) {
      const auto product =
          CoagulationSpec::from_function([](double x, double y) { return x * y; }, k, sigma, sigma + excess);
      ++tried;
      if (!verify_coagulation_bound(product).pass) ++rejected;
    }
  if (rejected != tried) {
    ok = false;
    why += " product kernel accepted for some triple;";
  }
  const bool binary = verify_breakage(BreakageSpec::binary_uniform(0.5)).all_ok();
  const bool parabolic = verify_breakage(BreakageSpec::parabolic(0.5)).all_ok();
  const auto half = BreakageSpec::from_function(
      [](double x, double y) { return x > y ? 0.0 : 6.0 * x * (y - x) / (y * y * y); }, 2, 0.5, 4.0, 3.0, 1.0);
  const bool half_mass_rejected = !verify_breakage(half).mass_ok;
  ok = ok && binary && parabolic && half_mass_rejected;
  return {ok, "product kernel rejected for " + std::to_string(rejected) + "/" + std::to_string(tried) +
                  " triples; 2/y " + (binary ? "accepted" : "rejected") + ", 12x(y-x)/y^3 " +
                  (parabolic ? "accepted" : "rejected") + ", 6x(y-x)/y^3 " +
                  (half_mass_rejected ? "rejected on mass" : "not rejected on mass") + why};
}

Outcome operator_oracle() {
  const int M = 8;
  std::vector<double> masses;
  for (int i = 1; i <= M; ++i) masses.push_back(i);
  const Grid g = grid_from_pivots(masses);
  Vector S = Vector::Ones(M);
  S(0) = 0.0;
  const oracle::DiscreteSystem systems[] = {
      {Matrix::Constant(M, M, 1.0), Vector::Zero(M), Matrix::Zero(M, M)},
      {Matrix::Zero(M, M), S, oracle::binary_uniform_fragments(M)},
      {Matrix::Constant(M, M, 1.0), S, oracle::binary_uniform_fragments(M)},
  };
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (const auto& sys : systems) {
    const auto t = assemble_discrete(sys.kernel, sys.selection, sys.fragments, g);
    for (int trial = 0; trial < 200; ++trial) {
      Vector c(M);
      for (int i = 0; i < M; ++i) c(i) = u(rng);
      double leak = 0.0;
      const Vector ref = oracle::discrete_rhs(sys, c, &leak);
      const Rates r = apply(t, c);
      worst = std::max({worst, (r.dconc - ref).cwiseAbs().maxCoeff(), std::abs(r.leak_mass_rate - leak)});
    }
  }
  return {worst <= 1e-12, "max |apply - oracle| " + fmt("%.3e", worst) + " (limit 1e-12)"};
}

Outcome uniqueness_metric() {
  const Grid g = build_grid(1e-4, 1e4, 64);
  const auto e = choose_uniqueness_exponents(2.0 / 3.0, 1.0 / 3.0, 1.0, 0.5);
  const double lambda = 2.0 / 3.0, sigma = 1.0 / 3.0, alpha = 1.0, r2 = 0.5, eps = 1e-15;
  const bool constraints = (lambda - sigma) + e.k1 >= -eps && (lambda - sigma) + e.k1 <= std::max(alpha, 1.0) + eps &&
                           sigma - e.k1 >= -eps && sigma - e.k1 <= r2 + eps && e.k2 > 0.0 &&
                           e.k2 <= std::min(std::abs(r2 - sigma), alpha) + eps;
  bool infeasible = false;
  try {
    choose_uniqueness_exponents(0.0, 0.0, 0.0, 0.5);
  } catch (const ConfigError&) {
    infeasible = true;
  }

  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto draw = [&] {
    DensityState s;
    s.conc.resize(g.size());
    for (Eigen::Index i = 0; i < g.size(); ++i) s.conc(i) = u(rng) < 0.2 ? 0.0 : u(rng);
    return s;
  };
  int violations = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto a = draw(), b = draw(), c = draw();
    const double ab = uniqueness_distance(a, b, e, g), ba = uniqueness_distance(b, a, e, g);
    const double ac = uniqueness_distance(a, c, e, g), bc = uniqueness_distance(b, c, e, g);
    if (!(ab >= 0.0) || ab != ba || uniqueness_distance(a, a, e, g) != 0.0 || (a.conc != b.conc && ab == 0.0) ||
        ac > ab + bc + 1e-12 * (ab + bc))
      ++violations;
  }
  return {violations == 0 && constraints && infeasible,
          std::to_string(violations) + " metric violations in 1000 triples; (2/3,1/3,1,1/2) -> k1 " + fmt("%.6g", e.k1) +
              ", k2 " + fmt("%.6g", e.k2) + (constraints ? " feasible" : " INFEASIBLE") + "; (0,0,0,1/2) " +
              (infeasible ? "reported infeasible" : "not reported")};
}

} // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s; // 0 = no runtime limit
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {1, "mass conservation", 120.0, mass_conservation},
      {2, "constant-kernel oracle", 60.0, constant_kernel_oracle},
      {3, "pure-fragmentation growth", 0.0, fragmentation_growth},
      {4, "truncation convergence", 0.0, truncation_convergence},
      {5, "envelope bound", 0.0, envelope_bound},
      {6, "verifier discrimination", 30.0, verifier_discrimination},
      {7, "operator oracle equivalence", 0.0, operator_oracle},
      {8, "uniqueness-distance metric", 0.0, uniqueness_metric},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_s > 0.0 && secs > c.budget_s) {
      o.pass = false;
      o.detail += "; runtime over budget";
    }
    if (!o.pass) ++failed;
    std::printf("[%s] %d %s: %s; %.2f s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
  }
  std::printf("%d of 8 criteria passed\n", 8 - failed);
  return failed == 0 ? 0 : 1;
}
