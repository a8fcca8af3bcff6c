#pragma once

// Command-line front end.  Subcommands: scales, run-full, run-limit, compare,
// residual.  Exit codes: 0 ok, 2 config error, 3 solver abort, 4 partial sweep.

#include <ostream>
#include <string>
#include <vector>

namespace coastal {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitAbort = 3;
inline constexpr int kExitPartial = 4;

/// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct PhysicalScales;

/// Applies one "name=value[unit]" override, e.g. "t_obs=2day" or
/// "W_wind=10m/s".  A bare number is read in the field's native unit.
/// Throws DomainError for unknown names, malformed numbers or units of the
/// wrong dimension.
void apply_scale_override(PhysicalScales& scales, const std::string& assignment);

}  // namespace coastal
