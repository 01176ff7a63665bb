#include <iostream>

#include "gridflow/cli/app.hpp"

int main(int argc, char** argv)
{
    return gridflow::cli::run(argc, argv, std::cout, std::cerr);
}
