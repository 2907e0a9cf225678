#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace symgrid {

/// Exit codes: 0 success, 1 non-convergence or run failure, 2 usage/parse/validation error.
/// `args[0]` is the program name; `modelSolver` and `matp2modl` act as solve/convert aliases.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace symgrid
