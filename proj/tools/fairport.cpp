#include <iostream>
#include <string>
#include <vector>

#include "fairport/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return fairport::run_cli(args, std::cout, std::cerr);
}
