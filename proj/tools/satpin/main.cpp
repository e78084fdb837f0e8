#include <iostream>

#include "satpin/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return satpin::cli::run(args, std::cout, std::cerr);
}
