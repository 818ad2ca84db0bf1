#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "pbe/errors.hpp"
#include "pbe/solver.hpp"

namespace pbe {

enum class RunMode { single, study, verify };

std::string to_string(RunMode mode);

/// Fully validated run configuration.
struct RunConfiguration {
  Simulation simulation;
  RunMode mode = RunMode::single;
  std::string output_dir = "out";

  // table sources, resolved paths; empty when the corresponding kernel is not tabulated
  std::string coagulation_table;
  std::string selection_table;
  std::string initial_table;

  std::vector<int> study_n = {4, 16, 64, 256};
  double r1 = 2.0;
  double r2 = 0.5;
  double strip_lo = 0.1;
  double strip_hi = 10.0;
};

/// Thrown by parse_config with every violated constraint, each prefixed by its field path.
class ConfigErrors : public ConfigError {
public:
  explicit ConfigErrors(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

private:
  std::vector<std::string> violations_;
};

/// Parses a JSON configuration document. Relative table paths resolve against `base_dir`.
RunConfiguration parse_config(const std::string& document, const std::string& base_dir = ".");
RunConfiguration parse_config(const nlohmann::json& document, const std::string& base_dir = ".");
inline RunConfiguration parse_config(const char* document, const std::string& base_dir = ".") {
  return parse_config(std::string(document), base_dir);
}
RunConfiguration load_config(const std::string& path);

/// Serializes every field, defaults included; parse_config(to_json(c)) reproduces c.
nlohmann::json to_json(const RunConfiguration& config);

} // namespace pbe
