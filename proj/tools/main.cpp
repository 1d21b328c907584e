#include <vector>

#include "koopman/cli.hpp"

int main(int argc, char** argv) {
    return koopman::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
