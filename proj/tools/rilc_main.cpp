#include <iostream>
#include <string>
#include <vector>

#include "rilc/cli/commands.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return rilc::cli::run(args, std::cout, std::cerr);
}
