#include <iostream>
#include <string>
#include <vector>

#include "superlin/cli.hpp"

int main(int argc, char** argv) {
  return superlin::cli::run(std::vector<std::string>(argv, argv + argc),
                            std::cout, std::cerr);
}
