#include <iostream>

#include "khoflow/cli.hpp"

int main(int argc, char** argv) { return khoflow::cli::run(argc, argv, std::cout, std::cerr); }
