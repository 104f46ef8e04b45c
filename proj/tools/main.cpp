#include "cli.hpp"

int main(int argc, char** argv)
{
    return cambrian::cli::run_cli(argc, argv);
}
