#include <iostream>
#include <string>
#include <vector>

#include "mlvse/cli/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return mlvse::cli::run(args, std::cout, std::cerr);
}
