#include <iostream>

#include "morlgen/cli.hpp"

int main(int argc, char** argv) { return morlgen::cli::run(argc, argv, std::cout, std::cerr); }
