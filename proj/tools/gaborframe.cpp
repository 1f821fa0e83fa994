#include "gabor/cli.hpp"

#include <iostream>

int main(int argc, char **argv) { return gabor::parse_and_dispatch(argc, argv, std::cout, std::cerr); }
