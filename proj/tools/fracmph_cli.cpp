#include <iostream>
#include <string>
#include <vector>

#include "fracmph/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return fracmph::cli::run(args, std::cout, std::cerr);
}
