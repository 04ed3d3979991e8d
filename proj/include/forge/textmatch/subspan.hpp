#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace forge::textmatch {

inline constexpr double kIdentifyThreshold = 0.5;
inline constexpr double kReplaceThreshold = 0.9;

// Sentence-split, tokenized form of a text, reusable across many comparisons.
struct PreparedText {
    std::vector<std::vector<std::string>> sentences;  // tokens per sentence
    std::vector<std::string> words;                   // all tokens, in order

    static PreparedText from(std::string_view raw);
    bool empty() const noexcept { return words.empty(); }
};

// Symmetric sub-span similarity: the best s_edit between any contiguous run
// of sentences of one text and the whole of the other, in either direction.
// Throws UndefinedInputError when either text has no words.
double subspan_similarity(std::string_view x, std::string_view y);
double subspan_similarity(const PreparedText& x, const PreparedText& y);

struct MatchResult {
    double score = 0.0;
    bool matched = false;
    std::optional<std::size_t> gt_index;
    std::optional<std::size_t> cand_index;
};

// Best sub-span similarity over all (ground truth, candidate) pairs;
// matched iff score > threshold. Pass a prefix of the candidates to get the
// identified@k verdict. Texts without words score 0 against everything.
MatchResult is_identified(std::span<const std::string> ground_truth,
                          std::span<const std::string> candidates,
                          double threshold = kIdentifyThreshold);

}  // namespace forge::textmatch
