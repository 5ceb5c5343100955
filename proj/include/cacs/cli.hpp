#ifndef CACS_CLI_HPP
#define CACS_CLI_HPP

#include <string>
#include <vector>

namespace cacs::cli {

// Exit codes: 0 success, 2 input/parse error, 3 geometry mismatch,
// 4 degenerate statistics.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitGeometry = 3;
inline constexpr int kExitDegenerate = 4;

// Run one invocation, e.g. {"score", "--volume", "v.nii.gz", ...}.
// Returns the process exit code; diagnostics go to standard error.
int run(const std::vector<std::string>& args);

int main(int argc, char** argv);

}  // namespace cacs::cli

#endif  // CACS_CLI_HPP
