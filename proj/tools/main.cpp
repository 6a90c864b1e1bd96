#include "cli.hpp"

int main(int argc, char** argv) {
    return chronoslyap::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
