#include <random>

#include <gtest/gtest.h>

#include "forge/common/error.hpp"
#include "forge/textmatch/levenshtein.hpp"
#include "forge/textmatch/locate.hpp"
#include "forge/textmatch/normalize.hpp"
#include "forge/textmatch/ratio.hpp"
#include "forge/textmatch/sentences.hpp"
#include "forge/textmatch/subspan.hpp"
#include "forge/textmatch/words.hpp"
#include "support/oracles.hpp"

using namespace forge::textmatch;
using Words = std::vector<std::string>;

namespace {

Words random_words(std::mt19937& rng, std::size_t max_len, char max_letter = 'e') {
    std::uniform_int_distribution<std::size_t> len(0, max_len);
    std::uniform_int_distribution<int> letter('a', max_letter);
    Words w(len(rng));
    for (auto& s : w) s = std::string(1, static_cast<char>(letter(rng)));
    return w;
}

// Random text of `n` sentences over a tiny vocabulary so that overlaps are common.
std::string random_text(std::mt19937& rng, std::size_t n) {
    static const char* vocab[] = {"alpha", "beta", "gamma", "delta", "model", "proof", "holds"};
    std::uniform_int_distribution<int> pick(0, 6), len(1, 5);
    std::string out;
    for (std::size_t s = 0; s < n; ++s) {
        const int words = len(rng);
        std::string sentence;
        for (int w = 0; w < words; ++w) {
            std::string word = vocab[pick(rng)];
            if (w == 0) word[0] = static_cast<char>(std::toupper(word[0]));
            sentence += (w ? " " : "") + word;
        }
        out += (s ? " " : "") + sentence + ".";
    }
    return out;
}

std::vector<std::vector<std::string>> tokenized_sentences(const std::string& text) {
    std::vector<std::vector<std::string>> out;
    for (const auto& s : split_sentences(text)) out.push_back(tokenize_words(s).words);
    return out;
}

}  // namespace

TEST(Tokenize, BasicSentence) {
    EXPECT_EQ(tokenize_words("The cat sat.").words, (Words{"the", "cat", "sat"}));
}

TEST(Tokenize, EmptyText) { EXPECT_TRUE(tokenize_words("").empty()); }

TEST(Tokenize, MathGroupIsOneToken) {
    EXPECT_EQ(tokenize_words("x $a+b$ y").words, (Words{"x", "$a+b$", "y"}));
    EXPECT_EQ(tokenize_words("x $a + b$, y").words, (Words{"x", "$a+b$", "y"}));
    EXPECT_EQ(tokenize_words("see \\(X = 1\\) now").words, (Words{"see", "\\(X=1\\)", "now"}));
}

TEST(Tokenize, CommentLinesAndMacrosStripped) {
    EXPECT_EQ(tokenize_words("A \\emph{bold} claim\n% hidden remark\nholds.").words,
              (Words{"a", "bold", "claim", "holds"}));
}

TEST(Tokenize, HyphenationRejoined) {
    EXPECT_EQ(tokenize_words("identifi-\ncation works").words, (Words{"identification", "works"}));
}

TEST(Tokenize, TokensHaveNoWhitespace) {
    std::mt19937 rng(7);
    const std::string alphabet = "ab $\\{}.,-\n\t%~()[]x";
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1), len(0, 60);
    for (int trial = 0; trial < 2000; ++trial) {
        std::string text;
        for (std::size_t i = len(rng); i > 0; --i) text.push_back(alphabet[pick(rng)]);
        for (const auto& w : tokenize_words(text).words) {
            ASSERT_FALSE(w.empty()) << text;
            for (char c : w) ASSERT_FALSE(std::isspace(static_cast<unsigned char>(c))) << text;
        }
    }
}

TEST(Tokenize, TruncateToWords) {
    EXPECT_EQ(truncate_to_words("one two three four", 2), "one two");
    EXPECT_EQ(truncate_to_words("one two", 5), "one two");
    EXPECT_EQ(word_count(truncate_to_words("a $x + y$ b c", 2)), 2u);
}

TEST(Sentences, SplitsOnTerminalPunctuation) {
    EXPECT_EQ(split_sentences("A is true. B is false."), (Words{"A is true.", "B is false."}));
    EXPECT_EQ(split_sentences("Really? Yes! Done."), (Words{"Really?", "Yes!", "Done."}));
}

TEST(Sentences, AbbreviationsDoNotSplit) {
    EXPECT_EQ(split_sentences("See Eq. 3 for details.").size(), 1u);
    EXPECT_EQ(split_sentences("Smith et al. Showed this. Then more.").size(), 2u);
    EXPECT_EQ(split_sentences("As in Fig. A, we see it.").size(), 1u);
}

TEST(Sentences, MathNotSplit) {
    EXPECT_EQ(split_sentences("Let $x = 1. 5$ hold. Then done."), (Words{"Let $x = 1. 5$ hold.", "Then done."}));
}

TEST(Sentences, JoinReproducesNormalizedInput) {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 300; ++trial) {
        const auto text = random_text(rng, 1 + trial % 6) + "  \n  e.g. $A. B$ more. Tail";
        const auto parts = split_sentences(text);
        std::string joined;
        for (const auto& p : parts) joined += (joined.empty() ? "" : " ") + p;
        EXPECT_EQ(joined, normalize_text(text));
    }
    EXPECT_TRUE(split_sentences("").empty());
}

TEST(Levenshtein, Examples) {
    EXPECT_EQ(levenshtein_words(Words{"a", "b"}, Words{"a", "b"}), 0u);
    EXPECT_EQ(levenshtein_words(Words{"a", "b", "c"}, Words{"a", "x", "c"}), 1u);
    EXPECT_EQ(levenshtein_words(Words{}, Words{"a", "b"}), 2u);
}

TEST(Levenshtein, MatchesNaiveRecursionOn1000Pairs) {
    std::mt19937 rng(2024);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto a = random_words(rng, 8);
        const auto b = random_words(rng, 8);
        ASSERT_EQ(levenshtein_words(a, b), forge::oracle::levenshtein_naive(a, b));
    }
}

TEST(Levenshtein, SymmetryAndTriangleInequality) {
    std::mt19937 rng(99);
    for (int trial = 0; trial < 500; ++trial) {
        const auto a = random_words(rng, 10), b = random_words(rng, 10), c = random_words(rng, 10);
        const auto ab = levenshtein_words(a, b), bc = levenshtein_words(b, c), ac = levenshtein_words(a, c);
        ASSERT_EQ(ab, levenshtein_words(b, a));
        ASSERT_LE(ac, ab + bc);
        ASSERT_EQ(ab == 0, a == b);
    }
}

TEST(SEdit, Examples) {
    EXPECT_DOUBLE_EQ(s_edit(Words{"a", "b"}, Words{"a", "b"}), 1.0);
    EXPECT_DOUBLE_EQ(s_edit(Words{"a"}, Words{"b"}), 0.0);
    const Words a{"a", "b", "c", "d"}, b{"a", "b", "c", "x"};
    EXPECT_DOUBLE_EQ(s_edit(a, b), 0.75);
    EXPECT_DOUBLE_EQ(1.0 - forge::oracle::levenshtein_naive(a, b) / 4.0, 0.75);
    EXPECT_THROW(s_edit(Words{}, Words{}), forge::UndefinedInputError);
    EXPECT_DOUBLE_EQ(s_edit(Words{}, Words{"a"}), 0.0);
}

TEST(SEdit, Properties) {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 500; ++trial) {
        auto a = random_words(rng, 9), b = random_words(rng, 9);
        if (a.empty()) a.push_back("a");
        const double s = s_edit(a, b);
        ASSERT_DOUBLE_EQ(s, s_edit(b, a));
        ASSERT_GE(s, 0.0);
        ASSERT_LE(s, 1.0);
        ASSERT_DOUBLE_EQ(s_edit(a, a), 1.0);
    }
}

TEST(Subspan, Examples) {
    EXPECT_DOUBLE_EQ(subspan_similarity("A. B. C.", "B."), 1.0);
    const std::string t = "The model converges. Its loss is bounded by two.";
    EXPECT_DOUBLE_EQ(subspan_similarity(t, t), 1.0);
    EXPECT_THROW(subspan_similarity("", "A."), forge::UndefinedInputError);
    EXPECT_THROW(subspan_similarity("A.", "  "), forge::UndefinedInputError);
}

TEST(Subspan, VerbatimSentenceRunScoresOne) {
    const std::string x = "First we train. Then we evaluate on held out data. Finally we report.";
    EXPECT_DOUBLE_EQ(subspan_similarity(x, "Then we evaluate on held out data. Finally we report."), 1.0);
}

TEST(Subspan, MatchesExhaustiveOracleUpToSixSentences) {
    std::mt19937 rng(31337);
    for (int trial = 0; trial < 400; ++trial) {
        const auto x = random_text(rng, 1 + trial % 6);
        const auto y = random_text(rng, 1 + (trial / 6) % 6);
        const double got = subspan_similarity(x, y);
        ASSERT_DOUBLE_EQ(got, forge::oracle::subspan_exhaustive(tokenized_sentences(x), tokenized_sentences(y)))
            << x << " | " << y;
        ASSERT_DOUBLE_EQ(got, subspan_similarity(y, x));
        ASSERT_GE(got + 1e-12, s_edit(tokenize_words(x), tokenize_words(y)));
    }
}

TEST(IsIdentified, Examples) {
    const std::vector<std::string> gt{"The proof holds."};
    const auto r = is_identified(gt, std::vector<std::string>{"The proof holds."});
    EXPECT_TRUE(r.matched);
    EXPECT_DOUBLE_EQ(r.score, 1.0);
    EXPECT_EQ(r.gt_index, 0u);
    EXPECT_EQ(r.cand_index, 0u);

    const auto none = is_identified(gt, std::vector<std::string>{});
    EXPECT_FALSE(none.matched);
    EXPECT_DOUBLE_EQ(none.score, 0.0);

    EXPECT_THROW(is_identified(std::vector<std::string>{}, gt), forge::ContractError);
}

TEST(IsIdentified, ThresholdIsStrict) {
    // distance 2 over 4 words: exactly 0.5, which does not exceed 0.5
    const std::vector<std::string> gt{"alpha beta gamma delta"};
    const std::vector<std::string> cand{"alpha beta model proof"};
    const auto r = is_identified(gt, cand);
    EXPECT_DOUBLE_EQ(r.score, 0.5);
    EXPECT_FALSE(r.matched);
}

TEST(IsIdentified, AgreesWithPairwiseOracleAndIsMonotone) {
    std::mt19937 rng(4242);
    for (int trial = 0; trial < 150; ++trial) {
        std::vector<std::string> gt{random_text(rng, 3), random_text(rng, 3)};
        std::vector<std::string> cands;
        double prev_score = 0.0;
        bool prev_matched = false;
        for (int k = 0; k < 4; ++k) {
            cands.push_back(random_text(rng, 3));
            const auto r = is_identified(gt, cands);
            double oracle = 0.0;
            for (const auto& g : gt)
                for (const auto& c : cands)
                    oracle = std::max(oracle, forge::oracle::subspan_exhaustive(tokenized_sentences(g), tokenized_sentences(c)));
            ASSERT_DOUBLE_EQ(r.score, oracle);
            ASSERT_EQ(r.matched, oracle > 0.5);
            ASSERT_GE(r.score, prev_score);
            ASSERT_TRUE(r.matched || !prev_matched);
            prev_score = r.score;
            prev_matched = r.matched;
        }
    }
}

TEST(Ratio, Examples) {
    EXPECT_DOUBLE_EQ(ratio_similarity("abcd", "abcd"), 1.0);
    EXPECT_DOUBLE_EQ(ratio_similarity("abcd", "wxyz"), 0.0);
    EXPECT_DOUBLE_EQ(ratio_similarity("abcd", "bcde"), 0.75);
    EXPECT_DOUBLE_EQ(forge::oracle::ratio_bruteforce("abcd", "bcde"), 0.75);
    EXPECT_DOUBLE_EQ(ratio_similarity("", ""), 1.0);
    EXPECT_DOUBLE_EQ(ratio_similarity("", "abc"), 0.0);
}

TEST(Ratio, MatchesBruteForceBlockEnumeration) {
    std::mt19937 rng(17);
    std::uniform_int_distribution<int> len(0, 40), letter('a', 'd');
    for (int trial = 0; trial < 1500; ++trial) {
        std::string a(len(rng), 'a'), b(len(rng), 'a');
        for (auto& c : a) c = static_cast<char>(letter(rng));
        for (auto& c : b) c = static_cast<char>(letter(rng));
        ASSERT_DOUBLE_EQ(ratio_similarity(a, b), forge::oracle::ratio_bruteforce(a, b)) << a << " | " << b;
        ASSERT_LE(ratio_similarity(a, b), quick_ratio(a, b) + 1e-12);
    }
}

TEST(Ratio, MatchingBlocksAreOrderedAndConsistent) {
    const auto blocks = matching_blocks("the quick brown fox", "the quack brown fax");
    std::size_t total = 0, last_a = 0, last_b = 0;
    for (const auto& blk : blocks) {
        EXPECT_GE(blk.a, last_a);
        EXPECT_GE(blk.b, last_b);
        EXPECT_EQ(std::string_view("the quick brown fox").substr(blk.a, blk.size),
                  std::string_view("the quack brown fax").substr(blk.b, blk.size));
        last_a = blk.a + blk.size;
        last_b = blk.b + blk.size;
        total += blk.size;
    }
    EXPECT_EQ(total, 17u);
}

TEST(Locate, ExactMatch) {
    const std::string src = "line one\nthe needle is here\nline three\n";
    const auto span = fuzzy_locate(src, "needle is");
    EXPECT_TRUE(span.exact);
    EXPECT_DOUBLE_EQ(span.ratio, 1.0);
    EXPECT_EQ(src.substr(span.char_start, span.char_end - span.char_start), "needle is");
}

TEST(Locate, OneCharacterOffFindsPassage) {
    const std::string passage = "We prove that the estimator is unbiased for all n.";
    const std::string src = "\\section{Intro}\nSome opening text here.\n" + passage + "\nMore text follows below.\n";
    const std::string needle = "We prove that the estimator is unbiased for all m.";
    const auto span = fuzzy_locate(src, needle);
    EXPECT_FALSE(span.exact);
    EXPECT_EQ(src.substr(span.char_start, span.char_end - span.char_start), passage);
    EXPECT_GT(span.ratio, 0.9);
    EXPECT_DOUBLE_EQ(span.ratio, forge::oracle::ratio_bruteforce(passage, needle));
}

TEST(Locate, DissimilarNeedleScoresLow) {
    const auto span = fuzzy_locate("aaaa aaaa\nbbbb bbbb\n", "zzzz qqqq");
    EXPECT_FALSE(span.exact);
    EXPECT_LT(span.ratio, 0.9);
    EXPECT_LE(span.char_end, 20u);
}

TEST(Locate, VerbatimNeedleAlwaysExact) {
    std::mt19937 rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        std::string src = random_text(rng, 8);
        for (auto& c : src)
            if (c == '.' && rng() % 2) c = '\n';
        std::uniform_int_distribution<std::size_t> pos(0, src.size() - 1);
        std::size_t a = pos(rng), b = pos(rng);
        if (a > b) std::swap(a, b);
        const auto needle = src.substr(a, b - a + 1);
        const auto span = fuzzy_locate(src, needle);
        ASSERT_TRUE(span.exact);
        ASSERT_EQ(src.substr(span.char_start, span.char_end - span.char_start), needle);
    }
}

TEST(Replace, Examples) {
    const std::string src = "the cat sat";
    const LocatedSpan cat{4, 7, 1.0, true};
    EXPECT_EQ(replace_span(src, cat, "dog"), "the dog sat");
    EXPECT_EQ(replace_span(src, cat, ""), "the  sat");
    EXPECT_EQ(replace_span(src, cat, "cat"), src);
    EXPECT_THROW(replace_span(src, LocatedSpan{5, 30, 0, false}, "x"), forge::BoundsError);
    EXPECT_THROW(replace_span(src, LocatedSpan{6, 5, 0, false}, "x"), forge::BoundsError);
}

TEST(Replace, ThenLocateFindsReplacement) {
    std::mt19937 rng(8);
    for (int trial = 0; trial < 100; ++trial) {
        const std::string src = random_text(rng, 5);
        const std::string replacement = "Zeta omega " + std::to_string(trial) + " quux.";
        const std::size_t start = src.size() / 3, end = src.size() / 2;
        const auto out = replace_span(src, LocatedSpan{start, end, 0.0, false}, replacement);
        ASSERT_EQ(out.size(), src.size() + replacement.size() - (end - start));
        const auto span = fuzzy_locate(out, replacement);
        ASSERT_TRUE(span.exact);
        ASSERT_DOUBLE_EQ(span.ratio, 1.0);
        ASSERT_EQ(span.char_start, start);
    }
}
