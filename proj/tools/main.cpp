#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return fracmin::cli::run(args, std::cout, std::cerr, fracmin::cli::process_environment());
}
