#include <iostream>
#include <string>
#include <vector>

#include "symgrid/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return symgrid::run_cli(args, std::cout, std::cerr);
}
