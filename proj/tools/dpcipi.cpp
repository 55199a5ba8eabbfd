#include <iostream>

#include "dpcipi/cli.hpp"

int main(int argc, char** argv) { return dpcipi::run_cli(argc, argv, std::cout, std::cerr); }
