#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mrc::cli {

// Exit statuses.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kFailure = 2;

// Runs the command line; diagnostics go to err, results to out.
int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mrc::cli
