#pragma once
#include <string>
#include <vector>

namespace corikit::cli {

// Exit codes: 0 success, 1 validation failure, 2 usage error.
int run(const std::vector<std::string>& args);
int run(int argc, char** argv);

}  // namespace corikit::cli
