#pragma once

#include <ostream>

namespace lpbmm::tools {

// Built-in property diagnostics. Prints one line per check, returns true if all pass.
bool run_checks(std::ostream& out, unsigned seed);

}  // namespace lpbmm::tools
