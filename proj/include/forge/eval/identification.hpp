#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "forge/llm/gateway.hpp"
#include "forge/pipeline/records.hpp"
#include "forge/textmatch/subspan.hpp"

namespace forge::eval {

struct ExcerptScore {
    double lev_score = 0.0;
    bool lev_match = false;
    bool judge_match = false;

    bool matched() const noexcept { return lev_match || judge_match; }
    friend bool operator==(const ExcerptScore&, const ExcerptScore&) = default;
};

// One identification model's answer for one benchmark pair.
struct IdentificationRun {
    std::string pair_id;
    std::string identification_model_id;
    std::string insertion_model_id;
    std::size_t word_limit = 0;
    std::vector<std::string> excerpts;  // ranked, at most 10
    std::vector<ExcerptScore> per_excerpt;
    bool refusal = false;
    std::size_t truncated = 0;  // excerpts cut to the word limit
    std::size_t dropped = 0;    // excerpts beyond the cap of 10
    bool scored = false;
    std::string judge_model_id;
    bool judge_failed = false;  // judge refused or answered without markers

    friend bool operator==(const IdentificationRun&, const IdentificationRun&) = default;
};

void to_json(nlohmann::json& j, const IdentificationRun& r);
void from_json(const nlohmann::json& j, IdentificationRun& r);

// Longest ground-truth excerpt in words. Throws ContractError when the
// ground truth is empty.
std::size_t compute_word_limit(const pipeline::PaperErrorPair& pair);

// Asks `model_id` for ranked error excerpts of the compiled pair. The PDF is
// attached when the provider accepts one, otherwise its extracted text is
// sent. Over-long excerpts are cut to the word limit; a refusal leaves the
// run empty.
IdentificationRun run_identification(const pipeline::PaperErrorPair& pair, const std::filesystem::path& data_root,
                                     llm::Gateway& gateway, const std::string& model_id, int max_retries = 1);

// Lev score per excerpt against the ground truth, plus one judge call that
// lists every candidate against every ground-truth excerpt. A judge that
// refuses or cannot be parsed leaves judge_match false throughout.
void score_run(IdentificationRun& run, const pipeline::PaperErrorPair& pair, llm::Gateway& gateway,
               const std::string& judge_model_id, int max_retries = 1,
               double threshold = textmatch::kIdentifyThreshold);

// The judge prompt for a candidate list; exposed for tests.
std::string judge_prompt(const std::vector<std::string>& candidates, const std::vector<std::string>& ground_truth);

}  // namespace forge::eval
