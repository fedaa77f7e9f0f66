#include <lineart/cli.hpp>

#include <iostream>

int main(int argc, char** argv) { return lineart::cli::run(argc, argv, std::cout, std::cerr); }
