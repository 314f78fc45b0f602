#include <iostream>

#include "critnode/app.hpp"

int main(int argc, char** argv) { return critnode::run_cli(argc, argv, std::cout, std::cerr); }
