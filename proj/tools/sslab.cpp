#include "sslab/cli.hpp"

int main(int argc, char** argv)
{
    return sslab::cli::run(argc, argv);
}
