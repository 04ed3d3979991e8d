#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "forge/eval/outcomes.hpp"

namespace forge::stats {

using eval::kMaxK;

double sigmoid(double x);

// Trials and successes per (insertion, identification) cell, for every k.
struct CellTable {
    struct Cell {
        std::size_t insertion = 0;       // index into insertion_models
        std::size_t identification = 0;  // index into identification_models
        std::size_t n = 0;
        std::array<std::size_t, kMaxK> successes{};
    };
    std::vector<std::string> insertion_models;       // sorted
    std::vector<std::string> identification_models;  // sorted
    std::vector<Cell> cells;
};

// Rows where insertion and identification model coincide are left out when
// exclude_same_model is set.
CellTable tabulate(std::span<const eval::OutcomeRow> rows, bool exclude_same_model = true);

struct FitOptions {
    double beta0 = -3.0;
    // Insertion model whose coefficient is pinned at 0; the first one in
    // sorted order when unset.
    std::optional<std::string> reference_insertion_model;
    int max_iterations = 100;
    double gradient_tolerance = 1e-8;
    bool exclude_same_model = true;
};

struct Coef {
    double value = 0.0;
    double se = 0.0;
};

// Pr(y_k = 1) = sigmoid(beta0 + beta[identification] + gamma[insertion]).
struct LogisticFit {
    int k = 0;
    double beta0 = -3.0;
    std::string reference_insertion_model;
    std::map<std::string, Coef> beta;   // identification models
    std::map<std::string, Coef> gamma;  // insertion models, reference at 0
    bool converged = false;
    double loglik = 0.0;
    double gradient_norm = 0.0;
    int iterations = 0;
    std::size_t observations = 0;
    // Free parameters ("beta:<id>", "gamma:<id>") and their covariance,
    // row-major; empty when the fit was not estimated from data.
    std::vector<std::string> parameters;
    std::vector<double> covariance;

    double linear_predictor(const std::string& insertion_model, const std::string& identification_model) const;
};

// Newton-Raphson (IRLS) on the Bernoulli log-likelihood with step halving;
// standard errors from the inverse observed information.
// Throws ConvergenceError when a model's outcomes are all 0 or all 1 (the
// message names it) or the iteration limit is reached, RankError for a
// singular information matrix, ContractError for empty input and
// LookupError for an unknown reference model.
LogisticFit fit_logistic(std::span<const eval::OutcomeRow> rows, int k, const FitOptions& options = {});
LogisticFit fit_cells(const CellTable& table, int k, const FitOptions& options = {});

// One fit per k = 1..10.
std::vector<LogisticFit> fit_all(std::span<const eval::OutcomeRow> rows, const FitOptions& options = {});

struct Prediction {
    double p = 0.0;
    double low = 0.0;
    double high = 0.0;
};

// sigmoid of the linear predictor, CI by the delta method on the linear
// predictor. Throws LookupError for an unknown model, ContractError for a
// fit that did not converge.
Prediction predict_accuracy(const LogisticFit& fit, const std::string& insertion_model,
                            const std::string& identification_model, double z = 1.96);

// Mean of beta over k = 1..10 per identification model. Throws
// IncompleteInputError unless every k appears exactly once with the same
// models.
std::map<std::string, double> aggregate_beta(std::span<const LogisticFit> fits);

}  // namespace forge::stats
