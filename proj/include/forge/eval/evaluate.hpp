#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "forge/eval/identification.hpp"
#include "forge/eval/outcomes.hpp"
#include "forge/llm/gateway.hpp"

namespace forge::eval {

struct EvaluationConfig {
    std::filesystem::path data_root;
    std::vector<std::string> identification_models;
    // Defaults to the insertion model of each pair's track.
    std::optional<std::string> judge_model;
    std::size_t workers = 1;
    int max_retries = 1;
    double identify_threshold = textmatch::kIdentifyThreshold;
};

struct EvaluationResult {
    std::vector<IdentificationRun> runs;  // sorted by (pair, model)
    std::vector<OutcomeRow> outcomes;
    std::vector<std::string> failures;  // "<pair> <model>: message"
};

// Every (benchmark pair, identification model) run, reusing scored runs
// saved under runs/<model>/ by earlier invocations. Writes
// results/{outcomes.csv,runs.jsonl,table4.csv}. A failing run is reported
// and left for the next invocation.
EvaluationResult evaluate_benchmark(const EvaluationConfig& config, llm::Gateway& gateway);

std::filesystem::path run_path(const std::filesystem::path& data_root, const std::string& model_id,
                               const std::string& pair_id);
std::filesystem::path results_dir(const std::filesystem::path& data_root);

std::vector<IdentificationRun> read_runs_jsonl(const std::filesystem::path& path);

}  // namespace forge::eval
