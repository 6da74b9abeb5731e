#include <iostream>

#include "edcps/cli/commands.hpp"

int main(int argc, char** argv) { return edcps::cli::run_cli(argc, argv, std::cout, std::cerr); }
