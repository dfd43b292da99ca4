#include <iostream>
#include <string>
#include <vector>

#include "femmir/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return femmir::run(args, std::cout, std::cerr);
}
