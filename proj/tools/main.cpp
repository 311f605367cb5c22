#include <string>
#include <vector>

#include "spandrop/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return spandrop::cli::run(args);
}
