#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cmv {

// Runs one toolkit command. Returns 0 when all checks pass, 1 when a check
// fails, 2 on bad usage or config, 3 on a numerical failure.
int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cmv
