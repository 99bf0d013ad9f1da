#include <string>
#include <vector>

#include "relbell/cli.hpp"

int main(int argc, char** argv)
{
    return relbell::cli::run(std::vector<std::string>(argv, argv + argc));
}
