#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace medqsl::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kInputError = 2;
inline constexpr int kNumericFailure = 3;
inline constexpr int kVacuousBound = 4;

/// Runs one invocation; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace medqsl::cli
