#include <iostream>

#include "uwr/cli.hpp"

int main(int argc, char** argv) { return uwr::cli::run(argc, argv, std::cout, std::cerr); }
