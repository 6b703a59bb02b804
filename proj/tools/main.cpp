#include <iostream>

#include "myller/cli.hpp"

int main(int argc, char** argv) { return myller::cli::run(argc, argv, std::cout, std::cerr); }
