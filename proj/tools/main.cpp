#include <iostream>

#include "remat/cli.hpp"

int main(int argc, char** argv) {
  return remat::run_cli(argc, argv, std::cout, std::cerr);
}
