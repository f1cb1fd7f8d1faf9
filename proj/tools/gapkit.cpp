#include <string>
#include <vector>

#include "gapkit/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return gapkit::cli::run(args);
}
