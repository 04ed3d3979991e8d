#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "forge/corpus/paper.hpp"
#include "forge/llm/gateway.hpp"
#include "forge/pipeline/records.hpp"
#include "forge/textmatch/subspan.hpp"

namespace forge::pipeline {

// One insertion track: every stage call goes to the same model as a fresh,
// stateless conversation.
struct StageContext {
    llm::Gateway& gateway;
    std::string model_id;
    int max_retries = 1;
    double replace_threshold = textmatch::kReplaceThreshold;
    double identify_threshold = textmatch::kIdentifyThreshold;
};

struct ClaimExtraction {
    std::vector<Claim> claims;
    std::optional<std::string> error;  // refusal or parse failure
};

// Duplicate claim texts are kept and flagged through Claim::duplicate_of.
ClaimExtraction extract_claims(const corpus::PaperSource& paper, const StageContext& ctx,
                               std::size_t max_claims = 0);

struct GenerationOutcome {
    std::optional<ErrorRecord> record;
    std::string drop_reason;  // "refusal" or "parse_error: ..." when dropped
};

GenerationOutcome generate_error(const corpus::PaperSource& paper, const Claim& claim, const StageContext& ctx,
                                 const std::string& error_id);

// Verdict filters. Pass leaves the status untouched; a "Filtering required"
// or ambiguous verdict moves the record to invalid_filtered or
// easy_prompt_filtered.
void filter_invalid(ErrorRecord& record, const corpus::PaperSource& paper, const StageContext& ctx);
void filter_easy_prompt(ErrorRecord& record, const corpus::PaperSource& paper, const StageContext& ctx);

struct InsertionResult {
    bool ok = false;
    std::string latex;  // modified source when ok, else empty
    std::vector<SpanDiagnostic> spans;
    std::vector<std::size_t> order;  // pair indices in replacement order
};

// Replaces every pair's original excerpt by its modified text, earliest
// location first, re-locating each excerpt after the previous replacement.
// Exact matches are taken as is; otherwise the best fuzzy window must score
// above `threshold`. Any failing pair fails the whole insertion.
InsertionResult insert_error(std::string_view latex, const llm::GeneratedError& error,
                             double threshold = textmatch::kReplaceThreshold);

// Puts the pairs' original texts back over the modified spans.
std::string revert_insertion(std::string_view modified_latex, const InsertionResult& result,
                             const llm::GeneratedError& error);

// insert_error on the paper; records diagnostics and moves the record to
// insert_failed on failure. Returns the modified source on success.
std::optional<std::string> apply_insertion(ErrorRecord& record, const corpus::PaperSource& paper,
                                           double threshold = textmatch::kReplaceThreshold);

// Ground truth = modified excerpts then localized ones, deduplicated.
// Localized excerpts that occur in neither source (normalized, or as a
// fuzzy match above the replace threshold) are dropped with a note.
void localize_error(ErrorRecord& record, const corpus::PaperSource& paper, std::string_view modified_latex,
                    const StageContext& ctx);

// Levenshtein-only check at the identify threshold; no judge.
void internal_identify(ErrorRecord& record, std::string_view modified_latex, const StageContext& ctx);

// Max word count over the ground-truth excerpts; 1 at least.
std::size_t ground_truth_word_limit(const GroundTruthSet& ground_truth);

// "\n\n"-joined original and modified excerpts of a multi-pair error.
std::string joined_originals(const llm::GeneratedError& error);
std::string joined_modified(const llm::GeneratedError& error);

}  // namespace forge::pipeline
