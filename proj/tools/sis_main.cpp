#include <iostream>

#include "sis/cli.hpp"

int main(int argc, char** argv) {
    return sis::run_cli(argc, argv, std::cout, std::cerr);
}
