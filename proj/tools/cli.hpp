#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace recipfm::cli {

/// Exit codes: 0 all checks pass, 1 a check failed, 2 bad input or evaluation error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace recipfm::cli
