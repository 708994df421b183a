#pragma once
// Command-line driver. Exit codes: 0 success, 1 domain failure (validation
// errors, defeated top claim, coverage gaps, violated duties), 2 usage or
// parse errors (including unreadable input files).

#include <ostream>
#include <string>
#include <vector>

namespace gsn {

// `args` excludes the program name.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace gsn
