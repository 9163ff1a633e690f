#include <string>
#include <vector>

#include "attractorlab/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return attractorlab::cli_dispatch(args);
}
