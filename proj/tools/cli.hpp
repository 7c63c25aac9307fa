#pragma once

#include <atomic>
#include <iosfwd>
#include <string>
#include <vector>

#include "asmprop/diagnostics.hpp"
#include "config.hpp"

namespace asmprop::cli {

enum ExitCode : int {
    kSuccess = 0,
    kFails = 1,
    kUsage = 2,
    kBackend = 3,
    kLimit = 4,
};

int exit_code_for(ErrorKind kind);

struct Streams {
    std::istream& in;
    std::ostream& out;
    std::ostream& err;
};

/// Runs one command line (without the program name) and returns its exit code.
int run(const std::vector<std::string>& args, Streams streams, const Getenv& getenv,
        const std::atomic<bool>* cancel = nullptr);

/// Splits a REPL line into words; double quotes group, backslash escapes.
std::vector<std::string> split_words(const std::string& line);

}  // namespace asmprop::cli
