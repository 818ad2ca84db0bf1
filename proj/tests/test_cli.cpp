#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "pbe_cli_test";

fs::path write_config(const std::string& name, const std::string& body) {
  fs::create_directories(kRoot);
  const fs::path p = kRoot / name;
  std::ofstream(p) << body;
  return p;
}

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(PBE_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<double>> read_rows(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

const char* kSmoluchowski = R"({
  "kernels": {
    "coagulation": {"form": "smoluchowski", "a": 3},
    "selection": {"form": "power", "S0": 1, "alpha": 1},
    "breakage": {"form": "binary-uniform", "gamma": 0.5}
  }
})";

const char* kConstant = R"({
  "kernels": {"coagulation": {"form": "constant"}},
  "grid": {"x_min": 1e-6, "x_max": 1e3, "cells": 160},
  "integrator": {"t_end": 1.0},
  "snapshots": {"count": 5}
})";

} // namespace

TEST_CASE("verify mode on the smoluchowski catalog entry") {
  const auto cfg = write_config("verify.json", kSmoluchowski);
  const fs::path out = kRoot / "verify_out";
  fs::remove_all(out);
  CHECK(run_cli("run --config " + cfg.string() + " --mode verify --out-dir " + out.string(), kRoot / "verify.log") == 0);
  const auto doc = nlohmann::json::parse(slurp(out / "verify.json"));
  CHECK(doc["coagulation_bound"]["pass"] == true);
  CHECK(doc["selection_bound"]["pass"] == true);
  CHECK(doc["breakage"]["pass"] == true);
  CHECK(doc["gamma_above_sigma"] == true);
  CHECK(doc["pass"] == true);
  CHECK_FALSE(fs::exists(out / "moments.csv"));
}

TEST_CASE("single constant-kernel run writes consistent artifacts") {
  const auto cfg = write_config("constant.json", kConstant);
  const fs::path out = kRoot / "nested" / "constant_out";
  fs::remove_all(kRoot / "nested");
  REQUIRE(run_cli("run --config " + cfg.string() + " --out-dir " + out.string(), kRoot / "constant.log") == 0);
  REQUIRE(fs::is_directory(out));

  const auto header = slurp(out / "moments.csv").substr(0, 46);
  CHECK(header == "t,N0,N1,N2,N_neg_gamma,mass_error,leak_mass\n0,");
  const auto rows = read_rows(out / "moments.csv");
  REQUIRE(rows.size() == 6);
  for (const auto& r : rows) {
    REQUIRE(r.size() == 7);
    CHECK(std::abs(r[1] - 2.0 / (2.0 + r[0])) <= 1e-3 * 2.0 / (2.0 + r[0]));
  }

  const auto diag = nlohmann::json::parse(slurp(out / "diagnostics.json"));
  const auto times = diag["snapshot_times"].get<std::vector<double>>();
  REQUIRE(times.size() == rows.size());
  for (std::size_t i = 0; i < times.size(); ++i) CHECK(times[i] == rows[i][0]);
  CHECK(diag["envelope"]["pass"] == true);
  CHECK(diag["moment_bounds"]["mass"]["pass"] == true);
  CHECK(diag["uniqueness_exponents"]["feasible"] == false);
  CHECK(diag["solver"]["accepted_steps"].get<int>() > 0);

  const auto snap = read_rows(out / "density_1.csv");
  CHECK(snap.size() == 160);
  CHECK(snap.front().size() == 4);
  CHECK(fs::exists(out / "density_0.csv"));
  CHECK(fs::exists(out / "density_0.2.csv"));
}

TEST_CASE("moments are written with round-trip precision") {
  const fs::path out = kRoot / "nested" / "constant_out";
  const auto text = slurp(out / "moments.csv");
  const auto second = text.substr(text.find('\n') + 1);
  const auto n0 = second.substr(2, second.find(',', 2) - 2);
  CHECK(n0.size() >= 17);
}

TEST_CASE("unwritable output path is an I/O error naming the path") {
  const auto cfg = write_config("constant2.json", kConstant);
  const fs::path blocker = kRoot / "blocker";
  std::ofstream(blocker) << "x";
  const fs::path log = kRoot / "unwritable.log";
  CHECK(run_cli("run --config " + cfg.string() + " --out-dir " + (blocker / "sub").string(), log) != 0);
  CHECK(slurp(log).find((blocker / "sub").string()) != std::string::npos);
}

TEST_CASE("strict gate and --no-strict") {
  fs::create_directories(kRoot);
  {
    std::ofstream t(kRoot / "product.csv");
    for (double x : {1e-3, 1.0, 1e3})
      for (double y : {1e-3, 1.0, 1e3}) t << x << ',' << y << ',' << x * y << '\n';
  }
  const auto cfg = write_config("product.json", R"({
    "kernels": {"coagulation": {"form": "custom-tabulated", "table": "product.csv", "k": 1, "sigma": 0, "lambda": 1}},
    "grid": {"x_min": 1e-3, "x_max": 1e2, "cells": 40},
    "integrator": {"t_end": 0.01},
    "snapshots": {"count": 1}
  })");
  const fs::path out = kRoot / "product_out";
  fs::remove_all(out);
  const fs::path log = kRoot / "product.log";
  CHECK(run_cli("run --config " + cfg.string() + " --out-dir " + out.string(), log) != 0);
  CHECK(slurp(log).find("coagulation bound") != std::string::npos);
  CHECK_FALSE(fs::exists(out / "moments.csv"));

  CHECK(run_cli("run --config " + cfg.string() + " --out-dir " + out.string() + " --no-strict", log) == 0);
  CHECK(fs::exists(out / "moments.csv"));
  const auto diag = nlohmann::json::parse(slurp(out / "diagnostics.json"));
  CHECK_FALSE(diag["warnings"].empty());

  CHECK(run_cli("run --config " + cfg.string() + " --out-dir " + out.string() + " --mode verify", log) == 1);
}

TEST_CASE("invalid configuration lists its violations") {
  const auto cfg = write_config("bad.json", R"({"kernels": {"coagulation": {"form": "constant", "sigma": 1.0},
                                                "selection": {"form": "power", "S0": 1, "alpha": 1.5}}})");
  const fs::path log = kRoot / "bad.log";
  CHECK(run_cli("run --config " + cfg.string(), log) != 0);
  const auto text = slurp(log);
  CHECK(text.find("sigma must lie in [0,1)") != std::string::npos);
  CHECK(text.find("kernels.selection.alpha") != std::string::npos);
}

TEST_CASE("study mode with a truncation override") {
  const auto cfg = write_config("study.json", R"({
    "kernels": {
      "coagulation": {"form": "smoluchowski", "a": 3},
      "selection": {"form": "power", "S0": 1, "alpha": 1},
      "breakage": {"form": "binary-uniform", "gamma": 0.5}
    },
    "grid": {"x_min": 1e-4, "x_max": 1e2, "cells": 60},
    "integrator": {"t_end": 0.2},
    "snapshots": {"count": 2},
    "study": {"n_list": [2, 8]}
  })");
  const fs::path out = kRoot / "study_out";
  fs::remove_all(out);
  REQUIRE(run_cli("run --config " + cfg.string() + " --out-dir " + out.string() + " --mode study --truncation-n 8",
                  kRoot / "study.log") == 0);
  const auto study = nlohmann::json::parse(slurp(out / "study.json"));
  CHECK(study["entries"].size() == 2);
  CHECK(study["pairwise_final"].size() == 1);
  CHECK(fs::exists(out / "moments.csv"));
}
