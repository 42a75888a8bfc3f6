#include <iostream>

#include "ebshrink/cli.hpp"

int main(int argc, char** argv) {
  return ebshrink::run_cli(argc, argv, std::cout, std::cerr);
}
