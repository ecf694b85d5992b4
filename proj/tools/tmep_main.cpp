#include "tmep/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return tmep::run_cli(argc, argv, std::cout, std::cerr); }
