#include <iostream>

#include "stabopt/cli.hpp"

int main(int argc, char** argv) { return stabopt::cli::run(argc, argv, std::cout, std::cerr); }
