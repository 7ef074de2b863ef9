#include <iostream>

#include "hfrac/cli.hpp"

int main(int argc, char** argv) { return hfrac::run_cli(argc, argv, std::cout, std::cerr); }
