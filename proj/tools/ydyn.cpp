#include <iostream>

#include "ydyn/cli/commands.hpp"

int main(int argc, char** argv) { return ydyn::cli::main_entry(argc, argv, std::cout, std::cerr); }
