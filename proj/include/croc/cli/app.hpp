#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace croc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitLoad = 2;
inline constexpr int kExitDoubleFault = 3;

/// Entry point of croc_emu. `args` excludes the program name. UART output
/// and REPL text go to `out`, diagnostics and the run summary to `err`.
int cli_main(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace croc::cli
