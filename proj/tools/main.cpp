#include <iostream>

#include "qcv_cli.hpp"

int main(int argc, char** argv) { return qcv::cli::run_command(argc, argv, std::cout, std::cerr); }
