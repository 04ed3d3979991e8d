#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace forge::textmatch {

// Word tokens of a text. No token is empty or contains whitespace.
struct WordSeq {
    std::vector<std::string> words;
    std::uint64_t source_hash = 0;

    std::size_t size() const noexcept { return words.size(); }
    bool empty() const noexcept { return words.empty(); }
    friend bool operator==(const WordSeq& a, const WordSeq& b) { return a.words == b.words; }
};

// Normalizes and splits on whitespace. Plain tokens are lowercased with
// leading and trailing ASCII punctuation stripped; a math group is kept
// verbatim (case included) as a single token with inner whitespace removed.
WordSeq tokenize_words(std::string_view text);

inline std::size_t word_count(std::string_view text) { return tokenize_words(text).size(); }

// Longest whitespace-delimited prefix of `text` whose word count does not
// exceed `limit`. Returns `text` unchanged when it is already within limit.
std::string truncate_to_words(std::string_view text, std::size_t limit);

}  // namespace forge::textmatch
