#include "pbe/run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "pbe/analysis.hpp"
#include "pbe/errors.hpp"

namespace pbe {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

void write_json(const fs::path& path, const json& doc) {
  auto out = open_output(path);
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

fs::path prepare_directory(const std::string& dir) {
  const fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec || !fs::is_directory(p)) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
  const fs::path probe = p / ".pbe_write_probe";
  {
    std::ofstream out(probe);
    if (!out) throw IoError("output directory '" + dir + "' is not writable");
  }
  fs::remove(probe, ec);
  return p;
}

std::string snapshot_name(double t) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "density_%.6g.csv", t);
  return buf;
}

json verdict_json(const SystemVerdict& v) {
  return {
      {"coagulation_bound",
       {{"pass", v.coagulation.pass},
        {"worst_ratio", v.coagulation.worst_ratio},
        {"worst_x", v.coagulation.worst_x},
        {"worst_y", v.coagulation.worst_y}}},
      {"selection_bound",
       {{"pass", v.selection.pass}, {"worst_ratio", v.selection.worst_ratio}, {"worst_x", v.selection.worst_x}}},
      {"breakage",
       {{"pass", v.breakage.all_ok()},
        {"mass_ok", v.breakage.mass_ok},
        {"count_ok", v.breakage.count_ok},
        {"gamma_ok", v.breakage.gamma_ok},
        {"sup_ok", v.breakage.sup_ok},
        {"worst_mass_error", v.breakage.worst_mass_error},
        {"worst_mass_y", v.breakage.worst_mass_y},
        {"max_fragment_count", v.breakage.max_fragment_count},
        {"worst_gamma_ratio", v.breakage.worst_gamma_ratio},
        {"max_sup", v.breakage.max_sup}}},
      {"gamma_above_sigma", v.gamma_above_sigma},
      {"pass", v.all_ok()},
  };
}

json check_json(const BoundCheck& c) {
  return {{"pass", c.pass},
          {"first_violation", c.first_violation},
          {"worst_ratio", c.worst_ratio},
          {"detail", c.detail}};
}

void write_moments(const fs::path& path, const RunOutput& run) {
  auto out = open_output(path);
  out << "t,N0,N1,N2,N_neg_gamma,mass_error,leak_mass\n";
  const double N1_0 = run.initial_mass();
  for (std::size_t i = 0; i < run.times.size(); ++i) {
    const auto& m = run.moments[i];
    const double leak = run.states[i].leaked_mass;
    const double ledger = m.N1 + leak - run.clipped_mass[i] - N1_0;
    const double err = N1_0 > 0.0 ? ledger / N1_0 : ledger;
    out << format_double(run.times[i]) << ',' << format_double(m.N0) << ',' << format_double(m.N1) << ','
        << format_double(m.N2) << ',' << format_double(m.N_neg_gamma) << ',' << format_double(err) << ','
        << format_double(leak) << '\n';
  }
}

void write_density(const fs::path& path, const DensityState& state, const Grid& grid) {
  auto out = open_output(path);
  out << "x_pivot,cell_width,concentration,density_estimate\n";
  const Vector w = grid.widths();
  const Vector d = density_estimate(state, grid);
  for (Eigen::Index i = 0; i < grid.size(); ++i)
    out << format_double(grid.pivots(i)) << ',' << format_double(w(i)) << ',' << format_double(state.conc(i))
        << ',' << format_double(d(i)) << '\n';
}

json diagnostics(const RunConfiguration& cfg, const RunOutput& run, const KernelSystem& system,
                 const std::vector<std::string>& warnings) {
  json doc;
  doc["snapshot_times"] = run.times;

  const auto env = make_envelope_constants(run, system, cfg.strip_lo, cfg.strip_hi);
  const auto ev = envelope_check(run, env, cfg.strip_lo, cfg.strip_hi);
  doc["envelope"] = {{"pass", ev.pass},
                     {"worst_ratio", ev.worst_ratio},
                     {"worst_x", ev.worst_x},
                     {"worst_t", ev.worst_t},
                     {"points_checked", ev.points_checked},
                     {"strip", {cfg.strip_lo, cfg.strip_hi}},
                     {"h0", env.h0},
                     {"X", env.X}};

  const auto mb = check_moment_bounds(run, system);
  doc["moment_bounds"] = {{"mass", check_json(mb.mass)},
                          {"number", check_json(mb.number)},
                          {"second_moment", check_json(mb.second_moment)},
                          {"negative", check_json(mb.negative)},
                          {"ledger_tolerance", mass_ledger_tolerance(run)}};

  const auto& K = system.coagulation;
  const auto& S = system.selection;
  try {
    const auto ue = choose_uniqueness_exponents(K.lambda, K.sigma, S.alpha, cfg.r2, system.breakage.gamma);
    doc["uniqueness_exponents"] = {{"feasible", true},
                                   {"k1", ue.k1},
                                   {"k2", ue.k2},
                                   {"k1_interval", {ue.k1_lo, ue.k1_hi}},
                                   {"k2_exceeds_gamma", ue.k2_exceeds_gamma}};
  } catch (const ConfigError& e) {
    doc["uniqueness_exponents"] = {{"feasible", false}, {"reason", e.what()}};
  }

  double total_clipped = run.clipped_mass.empty() ? 0.0 : run.clipped_mass.back();
  double dt_min = 0.0, dt_max = 0.0;
  if (!run.step_sizes.empty()) {
    dt_min = *std::min_element(run.step_sizes.begin(), run.step_sizes.end());
    dt_max = *std::max_element(run.step_sizes.begin(), run.step_sizes.end());
  }
  doc["solver"] = {{"accepted_steps", run.accepted_steps},
                   {"rejected_steps", run.rejected_steps},
                   {"dt_min", dt_min},
                   {"dt_max", dt_max},
                   {"clipped_mass", total_clipped},
                   {"leaked_mass", run.states.back().leaked_mass},
                   {"cells", run.grid.size()},
                   {"flags", run.flags}};
  doc["warnings"] = warnings;
  return doc;
}

std::vector<std::string> failed_checks(const SystemVerdict& v) {
  std::vector<std::string> out;
  if (!v.coagulation.pass) out.push_back("coagulation bound");
  if (!v.selection.pass) out.push_back("selection bound");
  if (!v.breakage.mass_ok) out.push_back("breakage mass");
  if (!v.breakage.count_ok) out.push_back("breakage fragment count");
  if (!v.breakage.gamma_ok) out.push_back("breakage negative moment");
  if (!v.breakage.sup_ok) out.push_back("breakage sup bound");
  if (!v.gamma_above_sigma) out.push_back("gamma above sigma");
  return out;
}

} // namespace

int run(const RunConfiguration& cfg, std::ostream& log) {
  const fs::path dir = prepare_directory(cfg.output_dir);
  const Simulation& sim = cfg.simulation;

  const SystemVerdict verdict = verify_system(sim.system);
  const auto failed = failed_checks(verdict);
  std::vector<std::string> warnings;
  for (const auto& f : failed) warnings.push_back("verification failed: " + f);

  if (cfg.mode == RunMode::verify) {
    json doc = verdict_json(verdict);
    doc["system"] = to_json(cfg)["kernels"];
    write_json(dir / "verify.json", doc);
    log << "verify: " << (verdict.all_ok() ? "pass" : "FAIL") << '\n';
    for (const auto& w : warnings) log << "  " << w << '\n';
    return verdict.all_ok() ? 0 : 1;
  }

  if (!failed.empty()) {
    if (sim.strict) {
      std::string msg = "kernel verification failed:";
      for (const auto& f : failed) msg += " [" + f + "]";
      throw ConfigError(msg + " (rerun with --no-strict to integrate anyway)");
    }
    for (const auto& w : warnings) log << "warning: " << w << '\n';
  }

  Simulation relaxed = sim;
  relaxed.strict = false;
  const RunOutput out = integrate(relaxed);
  const KernelSystem system = effective_system(sim);

  write_moments(dir / "moments.csv", out);
  for (std::size_t i = 0; i < out.times.size(); ++i)
    write_density(dir / snapshot_name(out.times[i]), out.states[i], out.grid);
  write_json(dir / "diagnostics.json", diagnostics(cfg, out, system, warnings));
  log << "single run: " << out.accepted_steps << " steps accepted, " << out.rejected_steps << " rejected\n";

  if (cfg.mode == RunMode::study) {
    const auto rep = truncation_study(relaxed, cfg.study_n, cfg.r1, cfg.r2);
    json entries = json::array();
    for (const auto& e : rep.entries)
      entries.push_back({{"n", e.n}, {"distance_final", e.distance_final}, {"distance_mid", e.distance_mid}});
    write_json(dir / "study.json", {{"r1", rep.r1},
                                    {"r2", rep.r2},
                                    {"entries", entries},
                                    {"pairwise_final", rep.pairwise_final},
                                    {"pairwise_mid", rep.pairwise_mid},
                                    {"nonincreasing", rep.nonincreasing},
                                    {"strictly_decreasing", rep.strictly_decreasing}});
    for (const auto& e : rep.entries)
      log << "study: n = " << e.n << " final distance " << format_double(e.distance_final) << '\n';
  }
  return 0;
}

} // namespace pbe
