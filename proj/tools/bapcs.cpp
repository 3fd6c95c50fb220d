#include <string>
#include <vector>

#include <bapcs/cli.hpp>

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return bapcs::cli::run_cli(args);
}
