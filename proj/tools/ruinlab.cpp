#include <iostream>

#include "ruinlab/cli.hpp"

int main(int argc, char** argv) { return ruinlab::cli::run(argc, argv, std::cout, std::cerr); }
