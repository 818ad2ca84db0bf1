#pragma once

#include <iosfwd>
#include <string>

#include "pbe/config.hpp"

namespace pbe {

/// Shortest round-trippable text for a double (17 significant digits).
std::string format_double(double v);

/// Executes a configuration and writes its artifacts into config.output_dir.
/// Returns 0 on success, 1 when verification fails in verify mode. Progress lines go to `log`.
int run(const RunConfiguration& config, std::ostream& log);

} // namespace pbe
