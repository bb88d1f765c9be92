#include <iostream>

#include "gew/cli.hpp"

int main(int argc, char** argv) { return gew::cli::run(argc, argv, std::cout, std::cerr); }
