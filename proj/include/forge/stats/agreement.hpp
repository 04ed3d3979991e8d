#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "forge/eval/identification.hpp"
#include "forge/eval/labels.hpp"

namespace forge::stats {

// One item: the value each coder gave, nullopt where the coder gave none.
using Unit = std::vector<std::optional<long>>;

struct AlphaOptions {
    std::size_t resamples = 1000;  // 0 skips the interval
    std::uint64_t seed = 0;
    std::size_t workers = 1;
};

struct AgreementResult {
    double alpha = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::size_t n_items = 0;      // items with at least two values
    std::size_t n_coders = 0;
    std::size_t n_pairable = 0;   // values in those items
    std::size_t failed_resamples = 0;
    std::string level = "nominal";

    nlohmann::json to_json() const;
};

// Nominal alpha from the coincidence matrix. 1 when no pair of values
// differs. Throws UndefinedInputError when no item has two values.
double krippendorff_alpha_point(std::span<const Unit> units);

// Point estimate plus a percentile interval from resampling items; resamples
// without pairable values are skipped and counted.
AgreementResult krippendorff_alpha(std::span<const Unit> units, const AlphaOptions& options = {});

struct InsertionAgreement {
    std::string insertion_model_id;
    std::size_t papers = 0;  // distinct pairs among the double-annotated items
    std::size_t items = 0;
    std::size_t agreed_identified = 0;
    std::size_t agreed_not_identified = 0;
    std::size_t disagreements = 0;
};

struct AgreementReport {
    AgreementResult human_human;
    AgreementResult auto_human;  // on items whose annotators agree
    eval::MetricComparison comparison;
    std::vector<InsertionAgreement> by_insertion;
    std::size_t double_annotated = 0;
    std::size_t disagreements = 0;

    double disagreement_fraction() const;
    std::string to_text() const;
    nlohmann::json to_json() const;
};

// Human labels against the automated verdict at k (either metric). Coders
// for the human-human alpha are the annotator ids. Throws like
// eval::compare_metrics.
AgreementReport summarize_agreement(std::span<const eval::IdentificationRun> runs,
                                    std::span<const eval::HumanLabel> labels, const AlphaOptions& options = {},
                                    int k = eval::kMaxK);

}  // namespace forge::stats
