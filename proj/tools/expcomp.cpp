#include <iostream>
#include <string>
#include <vector>

#include "expcomp/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return expcomp::run_cli(args, std::cout, std::cerr);
}
