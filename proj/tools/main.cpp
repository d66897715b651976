#include "nf/cli.hpp"

int main(int argc, char** argv) {
    return nf::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
