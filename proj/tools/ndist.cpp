#include <iostream>

#include "nulldist/cli.hpp"

int main(int argc, char** argv) { return nulldist::cli::run(argc, argv, std::cout, std::cerr); }
