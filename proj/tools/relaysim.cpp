#include <iostream>

#include "relaysim/cli/commands.hpp"

int main(int argc, char** argv) {
    return relaysim::cli::run_cli(argc, argv, std::cout, std::cerr);
}
