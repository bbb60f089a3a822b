#include <iostream>
#include <string>
#include <vector>

#include "trolink/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return trolink::cli::run(args, std::cout, std::cerr);
}
