#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pdsplit::app {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kIo = 2,
  kCertification = 3,
  kDivergence = 4,
};

// Entry point shared by the executable and the tests. Normal output goes to
// `out`, diagnostics to `err`; logging goes to stderr at the level named by
// the PDSPLIT_LOG_LEVEL environment variable (default: warn).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

// Turns the lines of a key=value config file into "--key value" tokens.
// Blank lines and lines starting with '#' are ignored. Throws on syntax errors.
std::vector<std::string> config_tokens(const std::string& text);

}  // namespace pdsplit::app
