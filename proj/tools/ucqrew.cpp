#include <iostream>

#include "ucqrew/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return ucqrew::run_cli(args, std::cout, std::cerr);
}
