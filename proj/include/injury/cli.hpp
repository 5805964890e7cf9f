#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace injury {

/// Runs the command line `args` (without the program name). Returns 0 on success,
/// 1 on validation errors or missing files, 2 on usage errors.
int cli_main(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

int cli_main(int argc, char** argv);

}  // namespace injury
