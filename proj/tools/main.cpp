#include "schureq/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return schureq::run_cli(argc, argv, std::cout, std::cerr);
}
