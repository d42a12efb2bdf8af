#include <iostream>

#include "phaseportrait/cli.hpp"

int main(int argc, char** argv) { return phaseportrait::cli_main(argc, argv, std::cout, std::cerr); }
