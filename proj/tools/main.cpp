#include "cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return phb::cli::cli_main(argc, argv, std::cout, std::cerr);
}
