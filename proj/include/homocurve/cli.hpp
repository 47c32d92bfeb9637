#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace homocurve::cli {

/// Runs one subcommand. args excludes the program name. A JSON summary is
/// written to `out`, diagnostics to `err`. Returns 0 on success, 2 on usage
/// errors and 1 on domain errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int main(int argc, char** argv);

}  // namespace homocurve::cli
