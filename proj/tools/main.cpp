#include <iostream>

#include "cufair/io.hpp"

int main(int argc, char** argv) {
  return cufair::cli_main(argc, argv, std::cout, std::cerr);
}
