#include <iostream>

#include "commands.hpp"

int main(int argc, char** argv) { return framegate::cli::run_cli(argc, argv, std::cerr); }
