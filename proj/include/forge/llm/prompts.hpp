#pragma once

#include <array>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace forge::llm {

enum class TemplateId {
    claim_extraction,
    error_generation,
    invalid_filter,
    easy_filter,
    localization,
    internal_identification,
    identification,
    judge,
};

inline constexpr std::array<TemplateId, 8> kAllTemplates{
    TemplateId::claim_extraction,        TemplateId::error_generation, TemplateId::invalid_filter,
    TemplateId::easy_filter,             TemplateId::localization,     TemplateId::internal_identification,
    TemplateId::identification,          TemplateId::judge,
};

std::string_view to_string(TemplateId id) noexcept;
// Throws LookupError for an unknown name.
TemplateId template_from_string(std::string_view name);

using PromptVars = std::map<std::string, std::string, std::less<>>;

// Slot names. Body slots keep the spelling used inside the prompt text;
// input slots belong to the inputs layout appended after the body.
namespace slot {
inline constexpr std::string_view word_limit = "word limit";
inline constexpr std::string_view identified = "identified error texts";
inline constexpr std::string_view ground_truth = "ground truth error text";
inline constexpr std::string_view latex = "latex";
inline constexpr std::string_view claim = "claim";
inline constexpr std::string_view original_text = "original_text";
inline constexpr std::string_view modified_text = "modified_text";
inline constexpr std::string_view explanation = "explanation";
inline constexpr std::string_view paper_text = "paper_text";
}  // namespace slot

struct PromptTemplate {
    TemplateId id;
    std::string_view body;    // instruction text, verbatim from the data file
    std::string_view inputs;  // layout of the material the prompt refers to

    // Slots that occur in body or inputs, in first-occurrence order.
    std::vector<std::string> slots(bool with_inputs = true) const;

    // Single pass over the text: "{name}" for a known slot name is replaced
    // by vars[name] (values are never rescanned); any other brace is literal.
    // Throws ContractError if a slot that occurs has no value. The inputs
    // layout follows the body after a blank line.
    std::string render(const PromptVars& vars, bool with_inputs = true) const;
};

const PromptTemplate& prompt_template(TemplateId id);

// The substitution primitive behind render().
std::string substitute_slots(std::string_view text, const PromptVars& vars);

}  // namespace forge::llm
