#include <iostream>

#include "polycwm/cli.hpp"

int main(int argc, char** argv) { return polycwm::cli::run(argc, argv, std::cout, std::cerr); }
