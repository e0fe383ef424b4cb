#include <iostream>

#include "roe/cli.hpp"

int main(int argc, char** argv) { return roe::run_cli(argc, argv, std::cout, std::cerr); }
