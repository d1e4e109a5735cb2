#include <iostream>
#include <string>
#include <vector>

#include "compacta/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return compacta::run_cli(args, std::cout, std::cerr);
}
