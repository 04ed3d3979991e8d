#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "forge/llm/parsers.hpp"

namespace forge::pipeline {

struct Claim {
    std::string paper_id;
    int claim_index = 0;  // 1-based
    std::string text;
    std::optional<int> duplicate_of;  // earlier claim with the same normalized text
};

enum class Stage {
    claim_extraction,
    error_generation,
    invalid_filter,
    easy_filter,
    insertion,
    localization,
    internal_identification,
    compilation,
};
inline constexpr std::size_t kStageCount = 8;

std::string_view to_string(Stage s);
Stage stage_from_string(std::string_view s);

enum class ErrorStatus {
    generated,
    invalid_filtered,
    easy_prompt_filtered,
    insert_failed,
    localized,
    internally_identified,
    survived,
    compile_failed,
    compiled,
    excluded,  // persistent gateway failure; excluded_at names the stage
};

std::string_view to_string(ErrorStatus s);
ErrorStatus status_from_string(std::string_view s);
bool is_terminal(ErrorStatus s);

enum class Provenance { modified, localized };

struct GroundTruthExcerpt {
    std::string text;
    Provenance provenance = Provenance::modified;
    friend bool operator==(const GroundTruthExcerpt&, const GroundTruthExcerpt&) = default;
};

struct GroundTruthSet {
    std::vector<GroundTruthExcerpt> excerpts;

    // False (and nothing added) when an excerpt with the same normalized
    // text is already present, or the text normalizes to nothing.
    bool add(std::string text, Provenance provenance);
    std::vector<std::string> texts() const;
    bool empty() const noexcept { return excerpts.empty(); }
    std::size_t size() const noexcept { return excerpts.size(); }
};

// Where one original excerpt was found, in the text as it stood when the
// replacement was made.
struct SpanDiagnostic {
    std::size_t pair_index = 0;
    std::size_t char_start = 0;
    std::size_t char_end = 0;
    double ratio = 0.0;
    bool exact = false;
    bool accepted = false;
};

struct ErrorRecord {
    std::string error_id;
    std::string paper_id;
    int claim_index = 0;
    std::string claim;
    std::string insertion_model_id;
    llm::GeneratedError generated;
    std::optional<std::string> category;
    ErrorStatus status = ErrorStatus::generated;

    std::optional<bool> invalid_filter_passed;
    std::optional<bool> easy_filter_passed;
    std::vector<SpanDiagnostic> insertion;
    GroundTruthSet ground_truth;
    std::vector<std::string> internal_excerpts;
    double internal_score = 0.0;
    std::optional<Stage> excluded_at;
    std::string pdf_path;  // relative to the data root, set once compiled
    std::string compile_log;
    std::vector<std::string> notes;

    // Stage at which the record left the pipeline; nullopt while it is
    // still in flight or once compiled.
    std::optional<Stage> removed_at() const;
};

struct PaperErrorPair {
    std::string pair_id;
    std::string paper_id;
    std::string error_id;
    std::string insertion_model_id;
    std::string claim;
    std::string category;
    std::string explanation;
    std::string modified_latex_path;  // relative to the data root
    std::string modified_latex_sha256;
    std::string pdf_path;             // relative to the data root
    GroundTruthSet ground_truth;
};

std::string make_error_id(std::string_view paper_id, int claim_index, std::string_view model_id, int n);
std::string make_pair_id(std::string_view error_id);

void to_json(nlohmann::json& j, const Claim& c);
void from_json(const nlohmann::json& j, Claim& c);
void to_json(nlohmann::json& j, const GroundTruthSet& g);
void from_json(const nlohmann::json& j, GroundTruthSet& g);
void to_json(nlohmann::json& j, const ErrorRecord& r);
void from_json(const nlohmann::json& j, ErrorRecord& r);
void to_json(nlohmann::json& j, const PaperErrorPair& p);
void from_json(const nlohmann::json& j, PaperErrorPair& p);

}  // namespace forge::pipeline
