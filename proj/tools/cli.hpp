#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hlweak::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kHypothesis = 2,
  kOracleFailure = 3,
};

/// Entry point behind the hlweak binary. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Scan CSV header.
const std::string& scan_csv_header();

}  // namespace hlweak::cli
