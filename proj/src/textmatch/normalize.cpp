#include "forge/textmatch/normalize.hpp"

#include <array>
#include <cctype>

namespace forge::textmatch {

namespace {

constexpr std::array<std::string_view, 8> kFormattingMacros = {
    "emph", "textbf", "textit", "texttt", "textsc", "textrm", "textsf", "underline",
};

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_lower(char c) { return std::islower(static_cast<unsigned char>(c)) != 0; }

std::string drop_comment_lines(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    std::size_t pos = 0;
    while (pos <= raw.size()) {
        const auto nl = raw.find('\n', pos);
        const auto end = nl == std::string_view::npos ? raw.size() : nl;
        const auto line = raw.substr(pos, end - pos);
        const auto first = line.find_first_not_of(" \t\r\f\v");
        const bool comment = first != std::string_view::npos && line[first] == '%';
        if (!comment) {
            out.append(line);
            if (nl != std::string_view::npos) out.push_back('\n');
        }
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
    return out;
}

// "identifi-\n  cation" -> "identification"
std::string rejoin_hyphenation(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '-' && i > 0 && is_alpha(s[i - 1])) {
            std::size_t j = i + 1;
            bool newline = false;
            while (j < s.size() && is_space(s[j])) {
                newline = newline || s[j] == '\n';
                ++j;
            }
            if (newline && j < s.size() && is_lower(s[j])) {
                i = j - 1;
                continue;
            }
        }
        out.push_back(s[i]);
    }
    return out;
}

// Index one past the brace matching s[open] == '{', or npos.
std::size_t matching_brace(std::string_view s, std::size_t open) {
    int depth = 0;
    for (std::size_t i = open; i < s.size(); ++i) {
        if (s[i] == '\\') {
            ++i;
            continue;
        }
        if (s[i] == '{') ++depth;
        if (s[i] == '}' && --depth == 0) return i + 1;
    }
    return std::string_view::npos;
}

std::string strip_formatting(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] == '\\') {
            bool replaced = false;
            for (auto macro : kFormattingMacros) {
                const auto name_end = i + 1 + macro.size();
                if (s.compare(i + 1, macro.size(), macro) != 0) continue;
                std::size_t brace = name_end;
                while (brace < s.size() && s[brace] == ' ') ++brace;
                if (brace >= s.size() || s[brace] != '{') continue;
                const auto close = matching_brace(s, brace);
                if (close == std::string_view::npos) continue;
                out += strip_formatting(s.substr(brace + 1, close - brace - 2));
                i = close;
                replaced = true;
                break;
            }
            if (replaced) continue;
            if (i + 1 < s.size()) {
                out.push_back(s[i]);
                out.push_back(s[i + 1]);
                i += 2;
                continue;
            }
        }
        out.push_back(s[i] == '~' ? ' ' : s[i]);
        ++i;
    }
    return out;
}

std::string collapse_whitespace(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (char c : s) {
        if (is_space(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out.push_back(' ');
        pending_space = false;
        out.push_back(c);
    }
    return out;
}

}  // namespace

std::string normalize_text(std::string_view raw) {
    return collapse_whitespace(strip_formatting(rejoin_hyphenation(drop_comment_lines(raw))));
}

std::size_t math_group_end(std::string_view text, std::size_t pos) {
    constexpr auto npos = std::string_view::npos;
    if (pos >= text.size()) return npos;
    if (pos > 0 && text[pos - 1] == '\\' && text[pos] == '$') return npos;

    auto find_closer = [&](std::size_t from, std::string_view closer) -> std::size_t {
        for (std::size_t i = from; i + closer.size() <= text.size(); ++i) {
            if (text[i] == '\\' && closer[0] != '\\') {
                ++i;
                continue;
            }
            if (text.compare(i, closer.size(), closer) == 0) return i + closer.size();
        }
        return npos;
    };

    if (text.compare(pos, 2, "$$") == 0) return find_closer(pos + 2, "$$");
    if (text[pos] == '$') return find_closer(pos + 1, "$");
    if (text.compare(pos, 2, "\\(") == 0) return find_closer(pos + 2, "\\)");
    if (text.compare(pos, 2, "\\[") == 0) return find_closer(pos + 2, "\\]");
    return npos;
}

}  // namespace forge::textmatch
