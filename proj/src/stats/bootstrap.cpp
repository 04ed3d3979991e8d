#include "forge/stats/bootstrap.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <random>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "forge/common/error.hpp"
#include "forge/common/parallel.hpp"

namespace forge::stats {

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw ContractError("quantile of an empty sample");
    if (!(q >= 0.0 && q <= 1.0)) throw ContractError(fmt::format("quantile level {} outside [0, 1]", q));
    std::sort(values.begin(), values.end());
    const double h = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<AggregateScore> rank_scores(const std::map<std::string, double>& beta) {
    std::vector<AggregateScore> out;
    for (const auto& [model, b] : beta) out.push_back({model, b, b, b, 0});
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.beta > b.beta; });
    for (std::size_t i = 0; i < out.size(); ++i) out[i].rank = static_cast<int>(i + 1);
    return out;
}

namespace {

// One pair's contribution: for each of its cells, the first rank that hit
// (0 = never).
struct PairRows {
    std::vector<std::pair<std::size_t, int>> cells;
};

std::map<std::string, double> aggregate_of(const CellTable& table, const FitOptions& fit) {
    std::vector<LogisticFit> fits;
    fits.reserve(kMaxK);
    for (int k = 1; k <= kMaxK; ++k) fits.push_back(fit_cells(table, k, fit));
    return aggregate_beta(fits);
}

}  // namespace

BootstrapResult bootstrap_beta(std::span<const eval::OutcomeRow> rows, const BootstrapOptions& options) {
    if (rows.empty()) throw ContractError("bootstrap of an empty outcome matrix");
    const CellTable full = tabulate(rows, options.fit.exclude_same_model);
    const auto point = aggregate_of(full, options.fit);

    // Cell index per (insertion, identification) of the full table; the
    // resampled tables keep the same layout with different counts.
    std::map<std::pair<std::string, std::string>, std::size_t> cell_index;
    for (std::size_t c = 0; c < full.cells.size(); ++c)
        cell_index[{full.insertion_models[full.cells[c].insertion],
                    full.identification_models[full.cells[c].identification]}] = c;
    std::map<std::string, std::size_t> pair_index;
    std::vector<PairRows> pairs;
    for (const auto& r : rows) {
        if (options.fit.exclude_same_model && r.insertion_model_id == r.identification_model_id) continue;
        auto [it, fresh] = pair_index.try_emplace(r.pair_id, pairs.size());
        if (fresh) pairs.emplace_back();
        int first = 0;
        for (int k = kMaxK; k >= 1; --k)
            if (r.at(k)) first = k;
        pairs[it->second].cells.emplace_back(cell_index.at({r.insertion_model_id, r.identification_model_id}), first);
    }
    if (pairs.empty()) throw ContractError("bootstrap: no rows left after excluding same-model rows");

    BootstrapResult result;
    result.resamples = options.resamples;
    for (const auto& [model, _] : point) result.models.push_back(model);

    const auto n_pairs = pairs.size();
    std::vector<std::optional<std::vector<double>>> per_resample(options.resamples);
    parallel_for(options.resamples, options.workers, [&](std::size_t i) {
        std::seed_seq seq{static_cast<std::uint32_t>(options.seed), static_cast<std::uint32_t>(options.seed >> 32),
                          static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i >> 32)};
        std::mt19937_64 rng(seq);
        std::uniform_int_distribution<std::size_t> pick(0, n_pairs - 1);
        CellTable t;
        t.insertion_models = full.insertion_models;
        t.identification_models = full.identification_models;
        t.cells = full.cells;
        for (auto& c : t.cells) {
            c.n = 0;
            c.successes.fill(0);
        }
        // Hits by first rank, then cumulated over k.
        std::vector<std::array<std::size_t, kMaxK + 1>> first_hit(t.cells.size());
        for (std::size_t d = 0; d < n_pairs; ++d) {
            for (const auto& [cell, first] : pairs[pick(rng)].cells) {
                ++t.cells[cell].n;
                ++first_hit[cell][static_cast<std::size_t>(first)];
            }
        }
        for (std::size_t c = 0; c < t.cells.size(); ++c) {
            std::size_t run = 0;
            for (int k = 1; k <= kMaxK; ++k) {
                run += first_hit[c][static_cast<std::size_t>(k)];
                t.cells[c].successes[static_cast<std::size_t>(k - 1)] = run;
            }
        }
        try {
            const auto agg = aggregate_of(t, options.fit);
            std::vector<double> v;
            for (const auto& m : result.models) v.push_back(agg.at(m));
            per_resample[i] = std::move(v);
        } catch (const Error&) {
            // Counted below.
        }
    });

    for (auto& r : per_resample) {
        if (r)
            result.draws.push_back(std::move(*r));
        else
            ++result.failed;
    }
    if (result.failed > 0)
        spdlog::info("bootstrap: {} of {} resamples failed to fit and were dropped", result.failed, options.resamples);
    if (static_cast<double>(result.failed) > options.max_failed_fraction * static_cast<double>(options.resamples) ||
        result.draws.empty())
        throw ReliabilityError(fmt::format("{} of {} bootstrap resamples failed to fit (limit {:.0f}%)", result.failed,
                                           options.resamples, 100 * options.max_failed_fraction),
                               result.failed, options.resamples);

    result.scores = rank_scores(point);
    for (auto& s : result.scores) {
        const auto col = static_cast<std::size_t>(
            std::find(result.models.begin(), result.models.end(), s.identification_model) - result.models.begin());
        std::vector<double> sample;
        sample.reserve(result.draws.size());
        for (const auto& d : result.draws) sample.push_back(d[col]);
        s.ci_low = quantile(sample, 0.025);
        s.ci_high = quantile(sample, 0.975);
    }
    return result;
}

}  // namespace forge::stats
