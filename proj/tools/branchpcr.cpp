#include <iostream>

#include "branchpcr/cli.hpp"

int main(int argc, char** argv) { return branchpcr::cli::run(argc, argv, std::cout, std::cerr); }
