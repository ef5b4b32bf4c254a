#include <iostream>

#include "stochalloc/tools/cli.hpp"

int main(int argc, char** argv) {
  return stochalloc::tools::run_command({argv + 1, argv + argc}, std::cout, std::cerr);
}
