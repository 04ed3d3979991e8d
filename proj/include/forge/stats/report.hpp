#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "forge/eval/outcomes.hpp"
#include "forge/stats/agreement.hpp"
#include "forge/stats/bootstrap.hpp"
#include "forge/stats/logistic.hpp"
#include "forge/stats/summary.hpp"

namespace forge::stats {

struct StatsOptions {
    FitOptions fit;
    std::size_t resamples = 1000;  // 0 skips the bootstrap
    std::uint64_t seed = 0;
    std::size_t workers = 1;
};

struct StatsResult {
    std::vector<eval::AccuracyCell> accuracy;
    std::vector<LogisticFit> fits;        // the k values that fitted
    std::vector<std::string> fit_errors;  // one line per k that did not
    std::vector<AggregateScore> scores;   // empty unless every k fitted
    std::size_t resamples = 0;
    std::size_t failed_resamples = 0;
    std::string bootstrap_error;  // empty when the interval is usable
    std::vector<CandidateCountCell> candidates;

    // Every fit converged and the bootstrap (if requested) succeeded.
    bool complete() const { return fit_errors.empty() && bootstrap_error.empty(); }
};

// Fit failures and bootstrap failures are recorded in the result, not
// thrown. Throws ContractError for empty input.
StatsResult compute_stats(std::span<const eval::OutcomeRow> rows, const StatsOptions& options = {});

std::string coefficients_csv(std::span<const LogisticFit> fits);
std::string scores_csv(std::span<const AggregateScore> scores);
std::string predictions_csv(std::span<const LogisticFit> fits);
// Predicted accuracy against k with 95% bands, one curve per identification
// model, for the reference insertion model.
std::string predicted_accuracy_svg(std::span<const LogisticFit> fits);
std::string summary_text(const StatsResult& result);

// table4.csv (accuracy@k), table5.csv (coefficients), table6.csv (aggregate
// scores), table7.csv (candidate counts), predicted.csv, fig3.svg and
// summary.txt; agreement.txt and agreement.json when a report is given.
// Files are written atomically; returns the paths written.
std::vector<std::filesystem::path> write_report_bundle(const std::filesystem::path& dir, const StatsResult& result,
                                                       const std::optional<AgreementReport>& agreement = {});

}  // namespace forge::stats
