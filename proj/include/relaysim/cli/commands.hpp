#pragma once

#include <iosfwd>

namespace relaysim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRuntime = 3;

// Environment variable capping the worker count of every run.
inline constexpr const char* kMaxWorkersEnv = "RELAYSIM_MAX_WORKERS";

// Subcommands: outage, ber, dmt, validate, constellation.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace relaysim::cli
