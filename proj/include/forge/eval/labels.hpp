#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "forge/eval/identification.hpp"
#include "forge/eval/outcomes.hpp"

namespace forge::eval {

struct HumanLabel {
    std::string pair_id;
    std::string identification_model_id;
    bool human_identified = false;
    std::string annotator_id;
};

// Header must name pair_id, identification_model_id, human_identified and
// annotator_id (any order). Throws ParseError on a bad row.
std::vector<HumanLabel> parse_labels_csv(std::string_view text);
std::vector<HumanLabel> read_labels_csv(const std::filesystem::path& path);

// All labels for one (pair, identification model).
struct LabeledItem {
    std::string pair_id;
    std::string identification_model_id;
    std::vector<std::pair<std::string, bool>> labels;  // annotator, value

    // The common value when every annotator agrees.
    std::optional<bool> agreed() const;
};

// Sorted by (pair, model). Throws ContractError when an annotator labels
// the same item twice.
std::vector<LabeledItem> group_labels(std::span<const HumanLabel> labels);

struct ClassStats {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0;
};

// Human labels as truth. confusion[truth][predicted], 0 = not identified.
// Undefined precision or recall counts as 0.
struct BinaryReport {
    std::array<std::array<std::size_t, 2>, 2> confusion{};
    ClassStats not_identified;
    ClassStats identified;
    double accuracy = 0.0;
    std::size_t n = 0;

    std::string to_text(std::string_view title) const;
    nlohmann::json to_json() const;
};

BinaryReport binary_report(const std::vector<bool>& truth, const std::vector<bool>& predicted);

struct MetricComparison {
    BinaryReport either;
    BinaryReport lev;
    BinaryReport judge;
    std::size_t items = 0;          // labeled (pair, model) items
    std::size_t disagreements = 0;  // excluded for lack of agreement
};

bool identified_by(const IdentificationRun& run, Metric metric, int k = kMaxK);

// Scores the automated verdicts at k against the agreed human labels.
// Throws LookupError naming every labeled item that has no run.
MetricComparison compare_metrics(std::span<const IdentificationRun> runs, std::span<const HumanLabel> labels,
                                 int k = kMaxK);

}  // namespace forge::eval
