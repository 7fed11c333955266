#include <iostream>

#include "llb/cli.hpp"

int main(int argc, char** argv) { return llb::cli_dispatch(argc, argv, std::cout, std::cerr); }
