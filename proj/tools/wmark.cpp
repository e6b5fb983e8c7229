#include <iostream>

#include "wmark/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return wmark::cli::run(args, std::cout, std::cerr);
}
