#include <iostream>

#include "nprint_cli.hpp"

int main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);
  return nprint::cli::run(argc, argv, {std::cout, std::cerr});
}
