#include "pitchstab/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return pitchstab::cli::dispatch(argc, argv, std::cout, std::cerr).exit_code;
}
