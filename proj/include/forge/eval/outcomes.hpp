#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "forge/eval/identification.hpp"

namespace forge::eval {

inline constexpr int kMaxK = 10;
inline constexpr std::string_view kPooled = "Both";

enum class Metric { either, lev, judge };

bool excerpt_matches(const ExcerptScore& s, Metric metric);

struct OutcomeRow {
    std::string pair_id;
    std::string insertion_model_id;
    std::string identification_model_id;
    std::array<bool, kMaxK> identified_at_k{};  // index k-1
    std::optional<std::size_t> n_candidates;

    bool at(int k) const { return identified_at_k.at(static_cast<std::size_t>(k - 1)); }
    friend bool operator==(const OutcomeRow&, const OutcomeRow&) = default;
};

// identified@k: some excerpt of rank <= k matches. Throws ContractError for
// an unscored run.
OutcomeRow outcome_of(const IdentificationRun& run, Metric metric = Metric::either);

// Rows sorted by (pair, identification model).
std::vector<OutcomeRow> build_outcome_matrix(std::span<const IdentificationRun> runs, Metric metric = Metric::either);

// Columns pair_id, insertion_model_id, identification_model_id, k1..k10,
// n_candidates (empty when unknown).
std::string outcomes_to_csv(std::span<const OutcomeRow> rows);
// Throws ParseError on malformed rows or a non-monotone k sequence.
std::vector<OutcomeRow> parse_outcomes_csv(std::string_view text);
std::vector<OutcomeRow> read_outcomes_csv(const std::filesystem::path& path);

struct AccuracyCell {
    std::string insertion_model_id;  // kPooled for the pooled rows
    std::string identification_model_id;
    std::size_t support = 0;
    std::array<std::size_t, kMaxK> hits{};

    double accuracy(int k) const;
};

// Pooled cells first, then one block per insertion model; identification
// models sorted within each block.
std::vector<AccuracyCell> accuracy_table(std::span<const OutcomeRow> rows);
std::string accuracy_table_csv(std::span<const AccuracyCell> cells);

}  // namespace forge::eval
