#include <iostream>

#include "sepkit/cli.hpp"

int main(int argc, char** argv) { return sepkit::run_cli(argc, argv, std::cout, std::cerr); }
