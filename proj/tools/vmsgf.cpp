#include <iostream>

#include "vmsgf/commands.hpp"

int main(int argc, char** argv) { return vmsgf::run_cli(argc, argv, std::cout, std::cerr); }
