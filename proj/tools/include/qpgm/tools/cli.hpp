#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qpgm::tools {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Name of the environment variable holding the worker count.
inline constexpr const char* kWorkersEnv = "PGM_WORKERS";

/// args excludes the program name. Never throws; every failure becomes an
/// exit code with a message on err.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qpgm::tools
