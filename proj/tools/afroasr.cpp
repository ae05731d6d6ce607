#include <iostream>
#include <string>
#include <vector>

#include "afroasr/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return afroasr::cli::run(args, std::cout, std::cerr, std::cin);
}
