#include "banachproj/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return banachproj::run_cli(argc, argv, std::cout, std::cerr); }
