#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "forge/stats/logistic.hpp"

namespace forge::stats {

// Linear interpolation between order statistics (R's type 7). q in [0, 1].
// Throws ContractError for an empty sample.
double quantile(std::vector<double> values, double q);

struct AggregateScore {
    std::string identification_model;
    double beta = 0.0;  // mean of beta over k = 1..10
    double ci_low = 0.0;
    double ci_high = 0.0;
    int rank = 0;  // 1 = highest beta
};

struct BootstrapOptions {
    std::size_t resamples = 1000;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
    double max_failed_fraction = 0.10;
    FitOptions fit;
};

struct BootstrapResult {
    std::vector<AggregateScore> scores;  // by rank
    std::size_t resamples = 0;
    std::size_t failed = 0;  // resamples where some per-k fit failed
    // Aggregate beta per resample that succeeded, one column per score in
    // identification-model order.
    std::vector<std::string> models;
    std::vector<std::vector<double>> draws;
};

// Resamples paper-error pairs with replacement (all rows of a pair move
// together), refits k = 1..10 and recomputes the aggregate beta. Resample i
// draws from its own generator seeded by (seed, i), so the worker count does
// not change the result. The point estimates come from the full data.
// Throws ContractError for empty input, whatever fit_logistic throws for the
// full data, and ReliabilityError when more than max_failed_fraction of the
// resamples fail.
BootstrapResult bootstrap_beta(std::span<const eval::OutcomeRow> rows, const BootstrapOptions& options = {});

// Ranks and wraps point estimates without an interval (ci = beta).
std::vector<AggregateScore> rank_scores(const std::map<std::string, double>& beta);

}  // namespace forge::stats
