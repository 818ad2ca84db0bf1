#include <doctest.h>

#include <cmath>

#include "pbe/errors.hpp"
#include "pbe/solver.hpp"

using namespace pbe;

namespace {

Simulation constant_benchmark() {
  Simulation s;
  s.system = {CoagulationSpec::constant(), SelectionSpec::zero(), BreakageSpec::binary_uniform(), {}};
  return s;
}

Simulation mass_benchmark() {
  Simulation s;
  s.system = {CoagulationSpec::smoluchowski(3.0), SelectionSpec::power(1.0, 1.0), BreakageSpec::binary_uniform(0.5), {}};
  return s;
}

} // namespace

TEST_CASE("zero rate field leaves the state unchanged") {
  const Grid g = build_grid(1e-3, 1e3, 20);
  const auto t = assemble({CoagulationSpec::zero(), SelectionSpec::zero(), BreakageSpec::binary_uniform(), {}}, g);
  DensityState s = project_initial(InitialProfile::exponential(1.0), g);
  IntegratorConfig cfg;
  const auto r = step(s, t, 0.01, cfg);
  CHECK(r.accepted);
  CHECK(r.state.conc == s.conc);
  CHECK(r.dt_next == doctest::Approx(std::min(kStepGrowth * 0.01, cfg.dt_max)));
  const auto big = step(s, t, 0.05, cfg);
  CHECK(big.dt_next == cfg.dt_max);
}

TEST_CASE("one constant-kernel step follows the Riccati solution") {
  const Grid g = build_grid(1e-6, 1e3, 180);
  const auto t = assemble(constant_benchmark().system, g);
  DensityState s;
  s.conc = Vector::Zero(g.size());
  s.conc(120) = 1.0;
  const auto r = step(s, t, 1e-3, IntegratorConfig{});
  REQUIRE(r.accepted);
  // N0(dt) = 2 / (2 + dt) = 1 - 5e-4 + O(dt^2)
  CHECK(std::abs(r.state.conc.sum() - 2.0 / 2.001) <= 1e-9);
  CHECK(std::abs(r.state.conc.sum() - (1.0 - 5e-4)) <= 3e-7);
}

TEST_CASE("one pure-fragmentation step grows the number by e^dt") {
  const Grid g = build_grid(1e-12, 1e3, 240);
  const auto t = assemble({CoagulationSpec::zero(), SelectionSpec::constant(1.0), BreakageSpec::binary_uniform(), {}}, g);
  DensityState s = project_initial(InitialProfile::exponential(1.0), g);
  const double n0 = s.conc.sum();
  const auto r = step(s, t, 1e-3, IntegratorConfig{});
  REQUIRE(r.accepted);
  CHECK(r.state.conc.sum() / n0 == doctest::Approx(std::exp(1e-3)).epsilon(1e-8));
}

TEST_CASE("step size underflow raises a stiffness error") {
  const Grid g = build_grid(1e-3, 1e3, 10);
  const auto t = assemble(constant_benchmark().system, g);
  DensityState s = project_initial(InitialProfile::exponential(1.0), g);
  CHECK_THROWS_AS(step(s, t, 1e-15, IntegratorConfig{}), StiffnessError);
}

TEST_CASE("uniform snapshots") {
  const auto t = uniform_snapshots(2.0, 4);
  REQUIRE(t.size() == 5);
  CHECK(t.front() == 0.0);
  CHECK(t[2] == 1.0);
  CHECK(t.back() == 2.0);
  CHECK_THROWS_AS(uniform_snapshots(1.0, 0), ConfigError);
}

TEST_CASE("constant kernel, exponential data: N0(1) = 2/3") {
  const RunOutput run = integrate(constant_benchmark());
  CHECK(run.times.back() == 1.0);
  CHECK(run.moments.back().N0 == doctest::Approx(2.0 / 3.0).epsilon(1e-3));
  for (std::size_t i = 0; i < run.times.size(); ++i)
    CHECK(run.moments[i].N0 == doctest::Approx(2.0 / (2.0 + run.times[i])).epsilon(1e-3));
}

TEST_CASE("zero kernels keep the initial state exactly") {
  Simulation s;
  s.system = {CoagulationSpec::zero(), SelectionSpec::zero(), BreakageSpec::binary_uniform(), {}};
  s.integrator.t_end = 5.0;
  const RunOutput run = integrate(s);
  CHECK(run.states.back().conc == run.states.front().conc);
  CHECK(run.states.back().leaked_mass == 0.0);
}

TEST_CASE("coagulation-fragmentation benchmark conserves mass") {
  const RunOutput run = integrate(mass_benchmark());
  const double m0 = run.moments.front().N1;
  for (std::size_t i = 0; i < run.times.size(); ++i) {
    const auto& s = run.states[i];
    CHECK((s.conc.array() >= 0.0).all());
    CHECK(std::abs(run.moments[i].N1 - m0) / m0 <= 1e-4);
    const double ledger = run.moments[i].N1 + s.leaked_mass - run.clipped_mass[i];
    CHECK(std::abs(ledger - m0) / m0 <= 10.0 * run.integrator.rel_tol);
  }
}

TEST_CASE("halving the tolerance barely moves N0(T)") {
  Simulation coarse = constant_benchmark();
  coarse.integrator.rel_tol = 1e-6;
  coarse.integrator.abs_tol = 1e-10;
  Simulation fine = coarse;
  fine.integrator.rel_tol = 5e-7;
  const double a = integrate(coarse).moments.back().N0;
  const double b = integrate(fine).moments.back().N0;
  CHECK(std::abs(a - b) < coarse.integrator.rel_tol);
}

TEST_CASE("runs are deterministic") {
  const RunOutput a = integrate(mass_benchmark());
  const RunOutput b = integrate(mass_benchmark());
  REQUIRE(a.states.size() == b.states.size());
  for (std::size_t i = 0; i < a.states.size(); ++i) {
    CHECK(a.states[i].conc == b.states[i].conc);
    CHECK(a.states[i].leaked_mass == b.states[i].leaked_mass);
  }
  CHECK(a.step_sizes == b.step_sizes);
}

TEST_CASE("strict mode refuses unverified kernels before stepping") {
  Simulation s = constant_benchmark();
  s.system.coagulation = CoagulationSpec::from_function([](double x, double y) { return x * y; }, 1.0, 0.0, 1.0);
  CHECK_THROWS_AS(integrate(s), ConfigError);
  s.strict = false;
  s.integrator.t_end = 0.01;
  s.snapshot_count = 1;
  const RunOutput run = integrate(s);
  CHECK_FALSE(run.flags.empty());
}

TEST_CASE("invalid integrator settings") {
  IntegratorConfig cfg;
  cfg.dt_init = 1.0;
  cfg.dt_max = 0.1;
  CHECK(!constraint_violations(cfg).empty());
  Simulation s = constant_benchmark();
  s.integrator.rel_tol = -1.0;
  CHECK_THROWS_AS(integrate(s), ConfigError);
}

TEST_CASE("truncated simulation integrates the truncated system") {
  Simulation s = mass_benchmark();
  s.truncation = TruncationParams{4, 0.5};
  s.integrator.t_end = 0.2;
  s.snapshot_count = 2;
  const auto sys = effective_system(s);
  CHECK(coagulation_rate(sys, 1e-3, 1.0) == 0.0);
  const RunOutput run = integrate(s);
  CHECK(run.states.size() == 3);
}
