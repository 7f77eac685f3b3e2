#include <iostream>

#include "lowrank/cli.hpp"

int main(int argc, char** argv) {
  return lowrank::cli::main(argc, argv, std::cout, std::cerr);
}
