#include <iostream>
#include <string>
#include <vector>

#include "irslab/cli.hpp"

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv + 1, argv + argc);
    const auto o = irslab::cli::run(args);
    std::cout << o.out << std::flush;
    std::cerr << o.err << std::flush;
    return o.exitCode;
}
