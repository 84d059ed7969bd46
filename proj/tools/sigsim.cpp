#include "sigsim/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return sigsim::cli::run(argc, argv, std::cout, std::cerr);
}
