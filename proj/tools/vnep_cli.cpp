// Command-line entry point; all logic lives in the vnep library.
#include <iostream>

#include "vnep/cli.hpp"

int main(int argc, char** argv) { return vnep::main_entry(argc, argv, std::cout, std::cerr); }
