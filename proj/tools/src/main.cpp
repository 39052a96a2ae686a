#include <iostream>

#include "odekit_cli/cli.hpp"

int main(int argc, char** argv) {
    return odekit::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
