#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "pbe/config.hpp"
#include "pbe/errors.hpp"
#include "pbe/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Coagulation-fragmentation population balance solver"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "Run a configuration and write its artifacts");
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::string> mode;
  std::optional<int> truncation_n;
  bool no_strict = false;
  run_cmd->add_option("--config", config_path, "JSON configuration file")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--out-dir", out_dir, "Output directory (overrides the configuration)");
  run_cmd->add_option("--mode", mode, "single, study or verify")
      ->check(CLI::IsMember({"single", "study", "verify"}));
  run_cmd->add_option("--truncation-n", truncation_n, "Truncate kernels at index n")->check(CLI::PositiveNumber);
  run_cmd->add_flag("--no-strict", no_strict, "Downgrade kernel verification failures to warnings");

  CLI11_PARSE(app, argc, argv);

  try {
    pbe::RunConfiguration cfg = pbe::load_config(config_path);
    if (out_dir) cfg.output_dir = *out_dir;
    if (mode) {
      if (*mode == "single") cfg.mode = pbe::RunMode::single;
      else if (*mode == "study") cfg.mode = pbe::RunMode::study;
      else cfg.mode = pbe::RunMode::verify;
    }
    if (truncation_n) {
      pbe::TruncationParams tp = cfg.simulation.truncation.value_or(pbe::TruncationParams{});
      tp.n = *truncation_n;
      cfg.simulation.truncation = tp;
    }
    if (no_strict) cfg.simulation.strict = false;
    return pbe::run(cfg, std::cout);
  } catch (const pbe::ConfigErrors& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const pbe::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
