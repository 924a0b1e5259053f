#include <iostream>

#include "cli_commands.hpp"

int main(int argc, char** argv) { return sbwave::cli::run(argc, argv, std::cout, std::cerr); }
