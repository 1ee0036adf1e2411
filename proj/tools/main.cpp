#include "cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return cbandit::run_cli(argc, argv, std::cout, std::cerr); }
