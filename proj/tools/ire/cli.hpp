#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ire::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kUsage = 2 };

/// Runs one command line (args[0] is the program name) and returns the
/// process exit status: 0 success, 1 crypto/format/I-O error, 2 usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Lowercase hex SHA-256 of `data`.
std::string fingerprint(const std::vector<std::uint8_t>& data);

}  // namespace ire::cli
