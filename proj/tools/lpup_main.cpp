#include "lpup/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return lpup::cli::main(argc, argv, std::cout, std::cerr); }
