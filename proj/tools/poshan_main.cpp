#include <iostream>

#include "poshan/cli.hpp"

int main(int argc, char** argv) { return poshan::run_cli(argc, argv, std::cout, std::cerr); }
