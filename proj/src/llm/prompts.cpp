#include "forge/llm/prompts.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "forge/common/error.hpp"
#include "forge/llm/embedded.hpp"

namespace forge::llm {

namespace {

constexpr std::array<std::string_view, 8> kNames{
    "claim_extraction", "error_generation",        "invalid_filter", "easy_filter",
    "localization",     "internal_identification", "identification", "judge",
};

constexpr std::array<std::string_view, 9> kSlotNames{
    slot::word_limit,    slot::identified,    slot::ground_truth, slot::latex,      slot::claim,
    slot::original_text, slot::modified_text, slot::explanation,  slot::paper_text,
};

std::string_view embedded(const std::string& file) {
    for (std::size_t i = 0; i < detail::kEmbeddedPromptCount; ++i) {
        if (detail::kEmbeddedPrompts[i].name == file) return detail::kEmbeddedPrompts[i].text;
    }
    throw LookupError(fmt::format("prompt file {} is not embedded", file));
}

// Calls on_slot(name, begin, end) for every known "{name}" in text.
template <typename F>
void scan_slots(std::string_view text, F&& on_slot) {
    for (std::size_t pos = text.find('{'); pos != std::string_view::npos; pos = text.find('{', pos + 1)) {
        const auto close = text.find('}', pos + 1);
        if (close == std::string_view::npos) return;
        const auto name = text.substr(pos + 1, close - pos - 1);
        if (std::find(kSlotNames.begin(), kSlotNames.end(), name) != kSlotNames.end()) on_slot(name, pos, close + 1);
    }
}

std::array<PromptTemplate, 8> load_all() {
    std::array<PromptTemplate, 8> out{};
    for (std::size_t i = 0; i < kAllTemplates.size(); ++i) {
        const std::string name(kNames[i]);
        out[i] = PromptTemplate{kAllTemplates[i], embedded(name + ".txt"), embedded(name + ".inputs.txt")};
    }
    return out;
}

}  // namespace

std::string_view to_string(TemplateId id) noexcept { return kNames[static_cast<std::size_t>(id)]; }

TemplateId template_from_string(std::string_view name) {
    for (std::size_t i = 0; i < kNames.size(); ++i)
        if (kNames[i] == name) return kAllTemplates[i];
    throw LookupError(fmt::format("unknown prompt template '{}'", name));
}

std::string substitute_slots(std::string_view text, const PromptVars& vars) {
    std::string out;
    out.reserve(text.size());
    std::size_t cursor = 0;
    scan_slots(text, [&](std::string_view name, std::size_t begin, std::size_t end) {
        auto it = vars.find(name);
        if (it == vars.end()) throw ContractError(fmt::format("no value for prompt slot {{{}}}", name));
        out.append(text.substr(cursor, begin - cursor));
        out.append(it->second);
        cursor = end;
    });
    out.append(text.substr(cursor));
    return out;
}

std::vector<std::string> PromptTemplate::slots(bool with_inputs) const {
    std::vector<std::string> out;
    auto add = [&](std::string_view name, std::size_t, std::size_t) {
        if (std::find(out.begin(), out.end(), name) == out.end()) out.emplace_back(name);
    };
    scan_slots(body, add);
    if (with_inputs) scan_slots(inputs, add);
    return out;
}

std::string PromptTemplate::render(const PromptVars& vars, bool with_inputs) const {
    std::string out = substitute_slots(body, vars);
    if (with_inputs && !inputs.empty()) {
        while (!out.empty() && out.back() == '\n') out.pop_back();
        out += "\n\n";
        out += substitute_slots(inputs, vars);
    }
    return out;
}

const PromptTemplate& prompt_template(TemplateId id) {
    static const std::array<PromptTemplate, 8> all = load_all();
    return all[static_cast<std::size_t>(id)];
}

}  // namespace forge::llm
