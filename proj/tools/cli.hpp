#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace simpf::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

// `args` excludes the program name. Subcommands: melspec, pool, render,
// flops, demo. Each accepts --json for machine-readable output on `out`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace simpf::cli
