#include "sddelab/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return sddelab::cli::main_entry(argc, argv, std::cout, std::cerr);
}
