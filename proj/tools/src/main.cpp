#include <iostream>
#include <string>
#include <vector>

#include "floquet_pt/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return fpt::cli::run(args, std::cout, std::cerr);
}
