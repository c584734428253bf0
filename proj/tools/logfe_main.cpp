#include <iostream>
#include <string>
#include <vector>

#include "logfe/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return logfe::run_cli(args, std::cout, std::cerr);
}
