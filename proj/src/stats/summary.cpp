#include "forge/stats/summary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <fmt/format.h>

#include "forge/common/csv.hpp"
#include "forge/common/error.hpp"

namespace forge::stats {

CountSummary summarize_counts(std::span<const double> values) {
    if (values.empty()) throw ContractError("summary of an empty sample");
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    CountSummary s;
    s.n = v.size();
    const auto mid = v.size() / 2;
    s.median = v.size() % 2 ? v[mid] : (v[mid - 1] + v[mid]) / 2;
    double sum = 0.0;
    for (double x : v) sum += x;
    s.mean = sum / static_cast<double>(s.n);
    if (s.n < 2) {
        s.sd = std::numeric_limits<double>::quiet_NaN();
    } else {
        double ss = 0.0;
        for (double x : v) ss += (x - s.mean) * (x - s.mean);
        s.sd = std::sqrt(ss / static_cast<double>(s.n - 1));
    }
    return s;
}

namespace {

using Key = std::pair<std::string, std::string>;

std::vector<CandidateCountCell> summarize(const std::map<Key, std::vector<double>>& by_cell) {
    std::vector<CandidateCountCell> out;
    for (const auto& [key, values] : by_cell) out.push_back({key.first, key.second, summarize_counts(values)});
    return out;
}

}  // namespace

std::vector<CandidateCountCell> candidate_count_summary(std::span<const eval::IdentificationRun> runs) {
    std::map<Key, std::vector<double>> by_cell;
    for (const auto& r : runs)
        by_cell[{r.insertion_model_id, r.identification_model_id}].push_back(static_cast<double>(r.excerpts.size()));
    return summarize(by_cell);
}

std::vector<CandidateCountCell> candidate_count_summary(std::span<const eval::OutcomeRow> rows) {
    std::map<Key, std::vector<double>> by_cell;
    for (const auto& r : rows)
        if (r.n_candidates)
            by_cell[{r.insertion_model_id, r.identification_model_id}].push_back(static_cast<double>(*r.n_candidates));
    return summarize(by_cell);
}

std::string candidate_counts_csv(std::span<const CandidateCountCell> cells) {
    std::string out = csv_row({"insertion_model_id", "identification_model_id", "n", "median", "mean", "sd"});
    for (const auto& c : cells)
        out += csv_row({c.insertion_model_id, c.identification_model_id, std::to_string(c.counts.n),
                        fmt::format("{:g}", c.counts.median), fmt::format("{:.2f}", c.counts.mean),
                        std::isnan(c.counts.sd) ? std::string("NA") : fmt::format("{:.2f}", c.counts.sd)});
    return out;
}

}  // namespace forge::stats
