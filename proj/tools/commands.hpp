#pragma once

#include <iosfwd>

namespace wfsim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;

/// Full command-line entry point; usable in-process. Normal output goes to
/// `out`, diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace wfsim::cli
