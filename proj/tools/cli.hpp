#pragma once

#include <iosfwd>

namespace sbarom::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitValidation = 2;

/// Entry point of the `sbarom` tool. Subcommands: reconstruct, select-order,
/// simulate, identify, compare. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sbarom::cli
