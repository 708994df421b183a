#include <iostream>
#include <vector>

#include "gsnassure/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return gsn::run_cli(std::move(args), std::cout, std::cerr);
}
