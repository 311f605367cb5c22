#pragma once

// Command-line surface. Exit codes: 0 success, 1 usage/validation error,
// 2 verification failure.

#include <iostream>
#include <string>
#include <vector>

namespace spandrop::cli {

int run(const std::vector<std::string>& args, std::ostream& out = std::cout,
        std::ostream& err = std::cerr);

}  // namespace spandrop::cli
