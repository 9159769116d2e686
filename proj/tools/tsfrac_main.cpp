#include "tsfrac/cli.hpp"

#include <iostream>
#include <vector>

int main(int argc, char** argv)
{
    return tsfrac::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout,
                           std::cerr);
}
