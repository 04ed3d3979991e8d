#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "forge/textmatch/words.hpp"

namespace forge::textmatch {

// Minimum number of word insertions, deletions and substitutions.
std::size_t levenshtein_words(std::span<const std::string> a, std::span<const std::string> b);

inline std::size_t levenshtein_words(const WordSeq& a, const WordSeq& b) {
    return levenshtein_words(std::span<const std::string>(a.words), std::span<const std::string>(b.words));
}

// 1 - distance / max(|a|, |b|). Throws UndefinedInputError when both are empty.
double s_edit(std::span<const std::string> a, std::span<const std::string> b);

inline double s_edit(const WordSeq& a, const WordSeq& b) {
    return s_edit(std::span<const std::string>(a.words), std::span<const std::string>(b.words));
}

}  // namespace forge::textmatch
