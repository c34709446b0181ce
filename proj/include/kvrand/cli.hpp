#ifndef KVRAND_CLI_HPP
#define KVRAND_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace kvrand::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kUsage = 1,        // bad flags or arguments
  kParse = 2,        // expression or table text
  kNumeric = 3,      // build or inversion failure
  kIo = 4,           // unreadable file, bad artifact
  kValidation = 5,   // validate ran but the KS gate failed
};

/// Runs one command line (without the program name). Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kvrand::cli

#endif  // KVRAND_CLI_HPP
