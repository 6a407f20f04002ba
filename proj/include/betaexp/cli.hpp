#pragma once

#include "betaexp/real.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace betaexp::cli {

// A decimal literal, or "omega:m" / "lambda:m" resolved to the threshold root.
Real resolve_real(const std::string& text);

// Runs one subcommand. args excludes the program name. Returns the process exit code:
// 0 success, 2 argument or limit error, 3 invariant violation (JSON diagnostic on err).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace betaexp::cli
