#include "croc/cli/app.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return croc::cli::cli_main(std::vector<std::string>(argv + 1, argv + argc), std::cin, std::cout, std::cerr);
}
