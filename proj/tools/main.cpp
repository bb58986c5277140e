#include <iostream>
#include <vector>

#include "rvlab/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return rvlab::cli_run(args, std::cout, std::cerr);
}
