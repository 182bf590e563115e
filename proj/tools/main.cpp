#include <iostream>

#include "jnlab/cli.hpp"

int main(int argc, char** argv) { return jnlab::run_cli(argc, argv, std::cout, std::cerr); }
