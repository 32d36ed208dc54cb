#include <iostream>
#include <string>
#include <vector>

#include "kentmix/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return kentmix::cli_main(args, std::cout, std::cerr);
}
