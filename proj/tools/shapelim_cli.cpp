#include <iostream>

#include "shapelim/cli.hpp"

int main(int argc, char** argv) { return shapelim::cli::run(argc, argv, std::cout, std::cerr); }
