#include <iostream>

#include "oos/cli.hpp"

int main(int argc, char** argv) { return oos::run_cli(argc, argv, std::cout, std::cerr); }
