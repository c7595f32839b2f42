#include "scatter_sense/cli.hpp"

#include <string>
#include <vector>

int main(int argc, char** argv)
{
    const std::vector<std::string> args(argv + 1, argv + argc);
    return scatter_sense::cli::run(args).exit_code;
}
