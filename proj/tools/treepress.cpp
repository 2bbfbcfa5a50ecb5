#include <iostream>

#include "treepress/cli.hpp"

int main(int argc, char** argv) { return treepress::cli::run(argc, argv, std::cout, std::cerr); }
