#include <iostream>

#include "srpkit/cli.hpp"

extern char** environ;

int main(int argc, char** argv) { return srp::run_cli(argc, argv, environ, std::cout, std::cerr); }
