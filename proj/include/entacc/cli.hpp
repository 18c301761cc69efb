#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace entacc::cli {

enum ExitCode : int {
  kOk = 0,
  kSelfCheckFailed = 1,
  kConfigError = 2,
  kIntegrationError = 3,
  kPartialSweepFailure = 4,
};

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name. Data goes to --out when given, otherwise to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace entacc::cli
