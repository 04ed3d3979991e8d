#include "forge/textmatch/words.hpp"

#include <cctype>

#include "forge/common/hash.hpp"
#include "forge/textmatch/normalize.hpp"

namespace forge::textmatch {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

void push_plain(std::vector<std::string>& out, std::string_view token) {
    std::size_t b = 0;
    std::size_t e = token.size();
    while (b < e && is_punct(token[b])) ++b;
    while (e > b && is_punct(token[e - 1])) --e;
    if (b >= e) return;
    std::string word(token.substr(b, e - b));
    for (char& c : word) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    out.push_back(std::move(word));
}

void push_math(std::vector<std::string>& out, std::string_view group) {
    std::string token;
    token.reserve(group.size());
    for (char c : group) {
        if (!is_space(c)) token.push_back(c);
    }
    out.push_back(std::move(token));
}

}  // namespace

WordSeq tokenize_words(std::string_view text) {
    WordSeq seq;
    seq.source_hash = fnv1a64(text);

    const std::string norm = normalize_text(text);
    const std::string_view s(norm);
    std::size_t token_start = 0;
    std::size_t i = 0;
    while (i < s.size()) {
        const auto math_end = math_group_end(s, i);
        if (math_end != std::string_view::npos) {
            push_plain(seq.words, s.substr(token_start, i - token_start));
            push_math(seq.words, s.substr(i, math_end - i));
            i = math_end;
            token_start = i;
            continue;
        }
        if (s[i] == '\\' && i + 1 < s.size() && s[i + 1] != ' ') {
            i += 2;
            continue;
        }
        if (s[i] == ' ') {
            push_plain(seq.words, s.substr(token_start, i - token_start));
            token_start = i + 1;
        }
        ++i;
    }
    push_plain(seq.words, s.substr(token_start));
    return seq;
}

std::string truncate_to_words(std::string_view text, std::size_t limit) {
    if (word_count(text) <= limit) return std::string(text);
    // Grow the prefix chunk by chunk; the first chunk that pushes the count
    // past the limit marks the cut.
    std::size_t cut = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        while (pos < text.size() && is_space(text[pos])) ++pos;
        std::size_t end = pos;
        while (end < text.size() && !is_space(text[end])) ++end;
        if (end == pos) break;
        if (word_count(text.substr(0, end)) > limit) break;
        cut = end;
        pos = end;
    }
    return std::string(text.substr(0, cut));
}

}  // namespace forge::textmatch
