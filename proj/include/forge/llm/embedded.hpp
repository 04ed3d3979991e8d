#pragma once

#include <cstddef>
#include <string_view>

namespace forge::llm::detail {

// Files of data/prompts compiled into the binary, sorted by file name.
struct EmbeddedPrompt {
    std::string_view name;
    std::string_view text;
};

extern const EmbeddedPrompt kEmbeddedPrompts[];
extern const std::size_t kEmbeddedPromptCount;

}  // namespace forge::llm::detail
