#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "forge/eval/identification.hpp"
#include "forge/eval/outcomes.hpp"

namespace forge::stats {

struct CountSummary {
    std::size_t n = 0;
    double median = 0.0;
    double mean = 0.0;
    double sd = 0.0;  // sample (n - 1); NaN below two values
};

// Throws ContractError for an empty sample.
CountSummary summarize_counts(std::span<const double> values);

struct CandidateCountCell {
    std::string insertion_model_id;
    std::string identification_model_id;
    CountSummary counts;
};

// Number of candidate excerpts per (insertion, identification) cell, sorted
// by both ids. Same-model cells are included. Rows without a count are
// skipped.
std::vector<CandidateCountCell> candidate_count_summary(std::span<const eval::IdentificationRun> runs);
std::vector<CandidateCountCell> candidate_count_summary(std::span<const eval::OutcomeRow> rows);

std::string candidate_counts_csv(std::span<const CandidateCountCell> cells);

}  // namespace forge::stats
