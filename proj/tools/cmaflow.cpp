#include <iostream>

#include "cmaflow/cli.hpp"

int main(int argc, char** argv) { return cmaflow::run_cli(argc, argv, std::cout, std::cerr); }
