#include "forge/textmatch/sentences.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "forge/textmatch/normalize.hpp"

namespace forge::textmatch {

namespace {

// Compared case-insensitively against the word that ends at the period.
constexpr std::array<std::string_view, 34> kAbbreviations = {
    "al.",   "e.g.",  "i.e.",   "etc.",  "cf.",    "vs.",   "resp.", "approx.", "eq.",
    "eqs.",  "fig.",  "figs.",  "sec.",  "secs.",  "tab.",  "ref.",  "refs.",   "thm.",
    "def.",  "lem.",  "prop.",  "cor.",  "alg.",   "app.",  "appx.", "ch.",     "no.",
    "dr.",   "mr.",   "ms.",    "prof.", "viz.",   "st.",   "jr.",
};

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) ==
                      std::tolower(static_cast<unsigned char>(y));
           });
}

bool ends_with_abbreviation(std::string_view s, std::size_t period) {
    const auto space = s.rfind(' ', period);
    const std::size_t word_start = space == std::string_view::npos ? 0 : space + 1;
    auto word = s.substr(word_start, period + 1 - word_start);
    while (!word.empty() && (word.front() == '(' || word.front() == '[')) word.remove_prefix(1);
    return std::any_of(kAbbreviations.begin(), kAbbreviations.end(),
                       [&](std::string_view abbr) { return iequals(word, abbr); });
}

}  // namespace

std::vector<std::string> split_sentences(std::string_view text) {
    const std::string norm = normalize_text(text);
    const std::string_view s(norm);
    std::vector<std::string> out;
    std::size_t start = 0;
    std::size_t i = 0;
    while (i < s.size()) {
        const auto math_end = math_group_end(s, i);
        if (math_end != std::string_view::npos) {
            i = math_end;
            continue;
        }
        if (s[i] == '\\' && i + 1 < s.size() && s[i + 1] != ' ') {
            i += 2;
            continue;
        }
        const char c = s[i];
        if (c == '.' || c == '!' || c == '?') {
            const bool at_end = i + 1 == s.size();
            const bool before_capital = i + 2 < s.size() && s[i + 1] == ' ' &&
                                        std::isupper(static_cast<unsigned char>(s[i + 2]));
            if ((at_end || before_capital) && !(c == '.' && ends_with_abbreviation(s, i))) {
                out.emplace_back(s.substr(start, i + 1 - start));
                start = i + 2;
                i = start;
                continue;
            }
        }
        ++i;
    }
    if (start < s.size()) out.emplace_back(s.substr(start));
    return out;
}

}  // namespace forge::textmatch
