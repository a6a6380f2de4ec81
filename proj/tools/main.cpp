#include "cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return mrc::cli::main(args, std::cout, std::cerr);
}
