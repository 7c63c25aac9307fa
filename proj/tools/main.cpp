#include <atomic>
#include <csignal>
#include <cstdlib>
#include <iostream>

#include "cli.hpp"

namespace {

std::atomic<bool> interrupted{false};

extern "C" void on_interrupt(int) {
    if (interrupted.exchange(true)) std::_Exit(130);
}

}  // namespace

int main(int argc, char** argv) {
    std::signal(SIGINT, on_interrupt);
    std::vector<std::string> args(argv + 1, argv + argc);
    return asmprop::cli::run(args, {std::cin, std::cout, std::cerr},
                             [](const char* name) { return std::getenv(name); }, &interrupted);
}
