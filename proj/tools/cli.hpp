#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cdde::cli {

// Exit codes.
inline constexpr int kPass = 0;
inline constexpr int kFail = 1;   // hypothesis or verification failure
inline constexpr int kInput = 2;  // unreadable, malformed or inadmissible input

// Runs `cdde-bound` with args (excluding the program name), writing reports
// to out and diagnostics to err. Returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cdde::cli
