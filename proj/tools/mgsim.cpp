#include "mgsim/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return mgsim::run_cli({argv, argv + argc}, std::cout, std::cerr);
}
