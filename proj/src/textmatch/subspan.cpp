#include "forge/textmatch/subspan.hpp"

#include <algorithm>

#include "forge/common/error.hpp"
#include "forge/textmatch/levenshtein.hpp"
#include "forge/textmatch/sentences.hpp"
#include "forge/textmatch/words.hpp"

namespace forge::textmatch {

PreparedText PreparedText::from(std::string_view raw) {
    PreparedText p;
    for (const auto& sentence : split_sentences(raw)) {
        auto tokens = tokenize_words(sentence).words;
        p.words.insert(p.words.end(), tokens.begin(), tokens.end());
        p.sentences.push_back(std::move(tokens));
    }
    return p;
}

namespace {

// max over contiguous sentence runs s of `spans` of s_edit(s, whole)
double best_subspan_against(const PreparedText& spans, std::span<const std::string> whole) {
    double best = 0.0;
    std::vector<std::string> run;
    for (std::size_t i = 0; i < spans.sentences.size(); ++i) {
        run.clear();
        for (std::size_t j = i; j < spans.sentences.size(); ++j) {
            run.insert(run.end(), spans.sentences[j].begin(), spans.sentences[j].end());
            if (run.empty()) continue;
            best = std::max(best, s_edit(run, whole));
            if (best >= 1.0) return best;
        }
    }
    return best;
}

}  // namespace

double subspan_similarity(const PreparedText& x, const PreparedText& y) {
    if (x.empty() || y.empty()) {
        throw UndefinedInputError("subspan_similarity: input has no words after sentence splitting");
    }
    const double forward = best_subspan_against(x, y.words);
    if (forward >= 1.0) return forward;
    return std::max(forward, best_subspan_against(y, x.words));
}

double subspan_similarity(std::string_view x, std::string_view y) {
    return subspan_similarity(PreparedText::from(x), PreparedText::from(y));
}

MatchResult is_identified(std::span<const std::string> ground_truth,
                          std::span<const std::string> candidates,
                          double threshold) {
    if (ground_truth.empty()) throw ContractError("is_identified: empty ground-truth set");
    if (!(threshold > 0.0 && threshold < 1.0)) throw ContractError("is_identified: threshold must lie in (0, 1)");

    MatchResult result;
    if (candidates.empty()) return result;

    std::vector<PreparedText> gt;
    gt.reserve(ground_truth.size());
    for (const auto& g : ground_truth) gt.push_back(PreparedText::from(g));

    bool any = false;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        const auto cand = PreparedText::from(candidates[c]);
        for (std::size_t g = 0; g < gt.size(); ++g) {
            const double score = (cand.empty() || gt[g].empty()) ? 0.0 : subspan_similarity(gt[g], cand);
            if (!any || score > result.score) {
                result.score = score;
                result.gt_index = g;
                result.cand_index = c;
                any = true;
            }
        }
    }
    result.matched = result.score > threshold;
    return result;
}

}  // namespace forge::textmatch
