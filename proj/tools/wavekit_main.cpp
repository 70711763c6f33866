#include <iostream>

#include "wavekit/cli/commands.hpp"

int main(int argc, char** argv) { return wavekit::cli::cli_main(argc, argv, std::cout, std::cerr); }
