#include <iostream>

#include "zdpot/cli.hpp"

int main(int argc, char** argv) { return zdpot::run(argc, argv, std::cout, std::cerr); }
