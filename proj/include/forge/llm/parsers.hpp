#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace forge::llm {

// "1. text" lines, numbered 1, 2, 3, ... in order; other lines are ignored.
// Throws ParseError (raw = offending line) on a gap or restart.
std::vector<std::string> parse_claims(std::string_view raw);

struct ExcerptPair {
    std::string original_text;
    std::string modified_text;
    friend bool operator==(const ExcerptPair&, const ExcerptPair&) = default;
};

struct GeneratedError {
    std::vector<ExcerptPair> pairs;
    std::string explanation;
    friend bool operator==(const GeneratedError&, const GeneratedError&) = default;
};

// Throws ContractError unless there is at least one pair, no original is
// empty and at least one pair actually changes its text.
void validate(const GeneratedError& error);

// ":original-text:" / ":modified-text:" / ":explanation:" blocks; hyphen,
// space or underscore accepted in the tag, case-insensitive. Each block is
// the text after its tag up to the next tag, minus surrounding blank lines.
// Throws ParseError on unpaired blocks, a missing explanation or a result
// that fails validate().
GeneratedError parse_generated_error(std::string_view raw);
std::string serialize_generated_error(const GeneratedError& error);

// Case-insensitive, whitespace-normalized containment. True iff only the
// positive literal occurs; throws VerdictError when both or neither do.
// Occurrences of the shorter literal inside the longer one do not count.
bool parse_verdict(std::string_view raw, std::string_view positive, std::string_view negative);

inline constexpr std::string_view kNoChangesRequired = "No changes required";
inline constexpr std::string_view kFilteringRequired = "Filtering required";

inline constexpr std::size_t kMaxExcerpts = 10;

struct IdentificationParse {
    std::vector<std::string> excerpts;
    std::size_t dropped = 0;  // blocks beyond the cap
};

// ":error-text:" / ":error text:" blocks (an optional leading rank number is
// allowed), in order, at most `cap`; the explanation block is discarded.
IdentificationParse parse_identification_detailed(std::string_view raw, std::size_t cap = kMaxExcerpts);
std::vector<std::string> parse_identification(std::string_view raw, std::size_t cap = kMaxExcerpts);

struct JudgeParse {
    std::vector<bool> verdicts;  // exactly expected_count entries
    std::size_t markers = 0;     // markers found in the text
};

// CORRECTLY IDENTIFIED / INCORRECTLY IDENTIFIED markers in order. Missing
// trailing verdicts are padded with false and surplus markers dropped, both
// with a warning. Throws ParseError when there are no markers,
// ContractError when expected_count is 0.
JudgeParse parse_judge_detailed(std::string_view raw, std::size_t expected_count);
std::vector<bool> parse_judge(std::string_view raw, std::size_t expected_count);

inline constexpr std::array<std::string_view, 6> kErrorCategories{
    "Error in algorithm/proof",
    "Error in reported results",
    "Error in implementation",
    "Inconsistencies in definitions",
    "Error in assumptions",
    "Incorrect or incomplete analysis",
};

struct Localization {
    std::string category;  // one of kErrorCategories, or empty if unrecognized
    std::vector<std::string> excerpts;
};

// Category is read from the text before the first "error:" marker, by name
// or by its number in the list. Excerpts are the "error:" blocks. Throws
// ParseError when there is no "error:" marker.
Localization parse_localization(std::string_view raw);

}  // namespace forge::llm
