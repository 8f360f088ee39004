#pragma once

// Command-line driver: one JSON config per run, deterministic outputs and a
// manifest of SHA-256 content hashes.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace qcs::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_internal = 1,
    exit_invalid_config = 2,
    exit_map_failure = 3,
    exit_verify_mismatch = 4,
};

struct Invocation {
    std::string command;
    std::filesystem::path config;
    std::optional<std::filesystem::path> out;
    unsigned threads = 0;  // 0: hardware concurrency
    bool verify = false;
    std::vector<std::string> overrides;  // key=value on top-level scalars
};

/// Runs one command and returns its exit code; messages go to stderr.
int execute(const Invocation& invocation);

/// Parses argv (CLI11) and calls execute.
int main(int argc, char** argv);

}  // namespace qcs::cli
