#include <iostream>

#include "twospin/cli.hpp"

int main(int argc, char** argv) { return twospin::run_cli(argc, argv, std::cout, std::cerr); }
