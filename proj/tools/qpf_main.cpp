#include <iostream>

#include "qpf/cli.hpp"

int main(int argc, char** argv) { return qpf::cli::run(argc, argv, std::cout, std::cerr); }
