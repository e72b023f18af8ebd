#include <iostream>

#include "pesym/cli/cli.hpp"

int main(int argc, char** argv) { return pesym::cli::run(argc, argv, std::cout, std::cerr); }
