#include <iostream>
#include <string>
#include <vector>

#include "uppertri/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return uppertri::cli::run(args, std::cout, std::cerr);
}
