#include <iostream>

#include "widom/cli.hpp"

int main(int argc, char** argv) { return widom::cli::run(argc, argv, std::cout, std::cerr); }
