#include <iostream>

#include "fjstooges/cli.hpp"

int main(int argc, char** argv) { return fj::cli::run(argc, argv, std::cout, std::cerr); }
