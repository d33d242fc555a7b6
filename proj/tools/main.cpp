#include <iostream>

#include "orddid/cli.hpp"

int main(int argc, char** argv) {
  return orddid::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
