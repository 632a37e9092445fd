#include <iostream>
#include <string>
#include <vector>

#include "frameflow/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return frameflow::run_cli(args, std::cout, std::cerr);
}
