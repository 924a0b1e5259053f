#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sbwave::cli {

enum ExitCode : int { kSuccess = 0, kInputError = 2, kComputeError = 3 };

/// Reads a single-column CSV: optional non-numeric header on the first
/// nonblank line, blank lines skipped, one number per row. Throws
/// std::invalid_argument naming the offending line.
std::vector<double> read_column(const std::string& path);

/// Entry point shared by the executable and the tests. argv[0] is the
/// program name.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sbwave::cli
