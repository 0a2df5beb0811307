#include "cssense/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return cssense::cli::run(argc, argv, std::cout, std::cerr);
}
