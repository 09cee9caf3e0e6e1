#include <iostream>

#include "bracketing/cli.hpp"

int main(int argc, char** argv) { return bracketing::cli_dispatch(argc, argv, std::cout, std::cerr); }
