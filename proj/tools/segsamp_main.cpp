#include <iostream>

#include "segsamp/cli.hpp"

int main(int argc, char** argv) { return segsamp::run_cli(argc, argv, std::cout, std::cerr); }
