#include "ncbm/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return ncbm::run_cli(argc, argv, std::cout, std::cerr); }
