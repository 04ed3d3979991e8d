#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace forge::cli {

// Settings shared by every subcommand. Sources are applied in order: built-in
// defaults, the config file, FORGE_<KEY> environment variables, then flags.
struct RunConfig {
    std::filesystem::path data_root = "forge-data";
    std::uint64_t seed = 0;
    std::size_t workers = 0;  // 0 = logical cores
    std::vector<std::string> insertion_models;
    std::vector<std::string> identification_models;
    std::optional<std::string> judge_model;
    double identify_threshold = 0.5;
    double replace_threshold = 0.9;
    int max_retries = 1;
    std::size_t max_claims = 0;
    int errors_per_claim = 1;
    std::string latex_engine = "pdflatex";
    int latex_timeout = 120;  // seconds
    std::optional<std::filesystem::path> mock_script;
    std::optional<std::filesystem::path> sources_dir;
    std::size_t bootstrap_resamples = 1000;
    // Stage toggles.
    bool bootstrap = true;
    bool compile_cache = true;
    std::optional<std::string> stop_after;

    std::size_t effective_workers() const;
    // Throws ConfigError for out-of-range values.
    void validate() const;
};

// Every key accepted in the file, as FORGE_<KEY> and as the RunConfig field
// of the same name.
const std::vector<std::string>& config_keys();

// Sets one key from its text form. Lists are comma-separated. Throws
// ConfigError for an unknown key or a malformed value; `source` names the
// origin in the message.
void set_key(RunConfig& config, std::string_view key, std::string_view value, std::string_view source);

// Minimal TOML subset: `key = value` lines, # comments, [section] headers
// (ignored, keys are flat), quoted strings, numbers, booleans and arrays of
// strings. Returns key -> text form in file order.
std::vector<std::pair<std::string, std::string>> parse_config_text(std::string_view text, std::string_view source);

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
EnvLookup process_env();

// Defaults, then `file` if given, then the environment.
RunConfig load_config(const std::optional<std::filesystem::path>& file, const EnvLookup& env);

}  // namespace forge::cli
