#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace jjq::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitDomain = 2;

// Runs one command line (arguments after the program name). Results go to
// `out` unless --out names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// "start:stop:count" -> count evenly spaced values, the last exactly `stop`.
std::vector<double> parse_range(const std::string& text);

}  // namespace jjq::cli
