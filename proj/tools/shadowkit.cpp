#include <iostream>

#include "shadowkit/cli.hpp"

int main(int argc, char** argv) { return shadowkit::cli::main(argc, argv, std::cout, std::cerr); }
