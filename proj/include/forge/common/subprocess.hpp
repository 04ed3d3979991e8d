#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace forge {

struct ProcessResult {
    int exit_code = -1;
    bool timed_out = false;
    bool signaled = false;
};

// Resolves a bare program name against PATH. Names containing '/' are
// checked directly.
std::optional<std::filesystem::path> find_executable(const std::string& name);

// Runs argv[0] with the given working directory, stdout and stderr both
// redirected to `output_file`. The child runs in its own process group and
// the whole group is killed when `timeout` elapses.
ProcessResult run_process(const std::vector<std::string>& argv,
                          const std::filesystem::path& cwd,
                          const std::filesystem::path& output_file,
                          std::chrono::milliseconds timeout);

}  // namespace forge
