#include "forge/llm/parsers.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <regex>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "forge/common/error.hpp"

namespace forge::llm {

namespace {

std::vector<std::string_view> split_lines(std::string_view raw) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= raw.size()) {
        auto end = raw.find('\n', start);
        if (end == std::string_view::npos) end = raw.size();
        auto line = raw.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        start = end + 1;
    }
    return lines;
}

bool blank(std::string_view line) {
    return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

// Joins lines, dropping leading and trailing blank ones.
std::string join_block(const std::vector<std::string_view>& lines) {
    std::size_t b = 0, e = lines.size();
    while (b < e && blank(lines[b])) ++b;
    while (e > b && blank(lines[e - 1])) --e;
    std::string out;
    for (std::size_t i = b; i < e; ++i) {
        if (i > b) out.push_back('\n');
        out.append(lines[i]);
    }
    return out;
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string collapse_ws(std::string_view s) {
    std::string out;
    bool space = false;
    for (unsigned char c : s) {
        if (std::isspace(c)) {
            space = !out.empty();
            continue;
        }
        if (space) out.push_back(' ');
        space = false;
        out.push_back(static_cast<char>(std::tolower(c)));
    }
    return out;
}

// A tagged block: tag name and the lines belonging to it.
struct Block {
    std::string tag;
    std::vector<std::string_view> lines;
};

// Splits `raw` at lines holding a tag. `tag_of` returns the tag name and the
// offset where the block text starts on that line, or nullopt.
template <typename TagOf>
std::vector<Block> split_blocks(std::string_view raw, TagOf&& tag_of) {
    std::vector<Block> blocks;
    for (auto line : split_lines(raw)) {
        if (auto t = tag_of(line)) {
            blocks.push_back(Block{t->first, {}});
            auto rest = line.substr(t->second);
            if (!blank(rest)) blocks.back().lines.push_back(rest.substr(rest.find_first_not_of(" \t")));
            continue;
        }
        if (!blocks.empty()) blocks.back().lines.push_back(line);
    }
    return blocks;
}

// ":name:" tag with optional markdown decoration and rank number in front.
std::optional<std::pair<std::string, std::size_t>> colon_tag(std::string_view line) {
    static const std::regex re(R"(^[\s*#>]*(?:\d+[.)]?\s*)?[*_]*:\s*([A-Za-z]+)[-_ ]?([A-Za-z]*)\s*:[*_]*)");
    std::match_results<std::string_view::const_iterator> m;
    if (!std::regex_search(line.begin(), line.end(), m, re)) return std::nullopt;
    std::string name = lower(m[1].str());
    if (m[2].length() > 0) name += "-" + lower(m[2].str());
    return std::make_pair(name, static_cast<std::size_t>(m.length(0)));
}

}  // namespace

std::vector<std::string> parse_claims(std::string_view raw) {
    static const std::regex re(R"(^\s*(?:[*_]{0,2})(\d+)[.)]\s+(.*\S)\s*$)");
    std::vector<std::string> claims;
    for (auto line : split_lines(raw)) {
        std::match_results<std::string_view::const_iterator> m;
        if (!std::regex_match(line.begin(), line.end(), m, re)) continue;
        const auto n = std::stoul(m[1].str());
        if (n != claims.size() + 1) {
            throw ParseError(fmt::format("claim numbered {} where {} was expected", n, claims.size() + 1), std::string(line));
        }
        claims.push_back(trim(m[2].str()));
    }
    return claims;
}

void validate(const GeneratedError& error) {
    if (error.pairs.empty()) throw ContractError("generated error has no excerpt pairs");
    bool changes = false;
    for (const auto& p : error.pairs) {
        if (p.original_text.empty()) throw ContractError("generated error has an empty original excerpt");
        changes = changes || p.original_text != p.modified_text;
    }
    if (!changes) throw ContractError("generated error leaves every excerpt unchanged");
}

GeneratedError parse_generated_error(std::string_view raw) {
    auto tag_of = [](std::string_view line) -> std::optional<std::pair<std::string, std::size_t>> {
        auto t = colon_tag(line);
        if (!t) return std::nullopt;
        if (t->first == "original-text" || t->first == "modified-text" || t->first == "explanation") return t;
        return std::nullopt;
    };
    GeneratedError out;
    std::optional<std::string> pending_original;
    bool have_explanation = false;
    for (const auto& block : split_blocks(raw, tag_of)) {
        const std::string text = join_block(block.lines);
        if (block.tag == "original-text") {
            if (pending_original) throw ParseError("original-text block without a modified-text block", text);
            pending_original = text;
        } else if (block.tag == "modified-text") {
            if (!pending_original) throw ParseError("modified-text block without a preceding original-text block", text);
            out.pairs.push_back({std::move(*pending_original), text});
            pending_original.reset();
        } else if (!have_explanation) {
            out.explanation = text;
            have_explanation = true;
        }
    }
    if (pending_original) throw ParseError("original-text block without a modified-text block", *pending_original);
    if (!have_explanation) throw ParseError("generated error lacks an explanation block", std::string(raw));
    try {
        validate(out);
    } catch (const ContractError& e) {
        throw ParseError(e.what(), std::string(raw));
    }
    return out;
}

std::string serialize_generated_error(const GeneratedError& error) {
    std::string out;
    for (const auto& p : error.pairs) {
        out += ":original-text:\n" + p.original_text + "\n\n";
        out += ":modified-text:\n" + p.modified_text + "\n\n";
    }
    out += ":explanation:\n" + error.explanation + "\n";
    return out;
}

bool parse_verdict(std::string_view raw, std::string_view positive, std::string_view negative) {
    const std::string text = collapse_ws(raw);
    const std::string pos = collapse_ws(positive), neg = collapse_ws(negative);
    if (pos.empty() || neg.empty() || pos == neg) throw ContractError("verdict literals must be distinct and non-empty");
    const bool pos_longer = pos.size() >= neg.size();
    const std::string& longer = pos_longer ? pos : neg;
    const std::string& shorter = pos_longer ? neg : pos;
    // Blank out the longer literal so its substrings are not counted twice.
    std::string rest = text;
    bool longer_found = false;
    for (auto p = rest.find(longer); p != std::string::npos; p = rest.find(longer, p)) {
        longer_found = true;
        rest.replace(p, longer.size(), std::string(longer.size(), '\x01'));
    }
    const bool shorter_found = rest.find(shorter) != std::string::npos;
    const bool has_pos = pos_longer ? longer_found : shorter_found;
    const bool has_neg = pos_longer ? shorter_found : longer_found;
    if (has_pos == has_neg) {
        throw VerdictError(has_pos ? "answer contains both verdicts" : "answer contains neither verdict", std::string(raw));
    }
    return has_pos;
}

IdentificationParse parse_identification_detailed(std::string_view raw, std::size_t cap) {
    auto tag_of = [](std::string_view line) -> std::optional<std::pair<std::string, std::size_t>> {
        auto t = colon_tag(line);
        if (!t) return std::nullopt;
        if (t->first == "error-text" || t->first == "explanation") return t;
        return std::nullopt;
    };
    IdentificationParse out;
    for (const auto& block : split_blocks(raw, tag_of)) {
        if (block.tag != "error-text") continue;
        std::string text = join_block(block.lines);
        if (trim(text).empty()) continue;
        if (out.excerpts.size() >= cap) {
            ++out.dropped;
            continue;
        }
        out.excerpts.push_back(std::move(text));
    }
    if (out.dropped > 0) spdlog::warn("identification answer had {} excerpts; kept the first {}", out.excerpts.size() + out.dropped, cap);
    return out;
}

std::vector<std::string> parse_identification(std::string_view raw, std::size_t cap) {
    return parse_identification_detailed(raw, cap).excerpts;
}

JudgeParse parse_judge_detailed(std::string_view raw, std::size_t expected_count) {
    if (expected_count == 0) throw ContractError("judge expected_count must be at least 1");
    static constexpr std::string_view marker = "CORRECTLY IDENTIFIED";
    JudgeParse out;
    for (auto p = raw.find(marker); p != std::string_view::npos; p = raw.find(marker, p + marker.size())) {
        const bool negative = p >= 2 && raw.substr(p - 2, 2) == "IN";
        out.verdicts.push_back(!negative);
    }
    out.markers = out.verdicts.size();
    if (out.markers == 0) throw ParseError("judge answer has no CORRECTLY/INCORRECTLY IDENTIFIED markers", std::string(raw));
    if (out.markers < expected_count) {
        spdlog::warn("judge gave {} verdicts for {} excerpts; padding with INCORRECTLY IDENTIFIED", out.markers, expected_count);
        out.verdicts.resize(expected_count, false);
    } else if (out.markers > expected_count) {
        spdlog::warn("judge gave {} verdicts for {} excerpts; ignoring the surplus", out.markers, expected_count);
        out.verdicts.resize(expected_count);
    }
    return out;
}

std::vector<bool> parse_judge(std::string_view raw, std::size_t expected_count) {
    return parse_judge_detailed(raw, expected_count).verdicts;
}

Localization parse_localization(std::string_view raw) {
    static const std::regex marker(R"(^[\s*#>]*(?:\d+[.)]\s*)?[*_]*error\s*(?:\d+\s*)?[*_]*:[*_]*)", std::regex::icase);
    Localization out;
    std::vector<std::string_view> preamble;
    std::vector<std::vector<std::string_view>> blocks;
    for (auto line : split_lines(raw)) {
        std::match_results<std::string_view::const_iterator> m;
        if (std::regex_search(line.begin(), line.end(), m, marker)) {
            blocks.emplace_back();
            auto rest = line.substr(static_cast<std::size_t>(m.length(0)));
            if (!blank(rest)) blocks.back().push_back(rest.substr(rest.find_first_not_of(" \t")));
            continue;
        }
        (blocks.empty() ? preamble : blocks.back()).push_back(line);
    }
    if (blocks.empty()) throw ParseError("localization answer has no 'error:' marker", std::string(raw));
    for (const auto& b : blocks) {
        auto text = join_block(b);
        if (!trim(text).empty()) out.excerpts.push_back(std::move(text));
    }

    const std::string head = lower(join_block(preamble));
    std::size_t best = std::string::npos;
    for (std::size_t i = 0; i < kErrorCategories.size(); ++i) {
        const auto p = head.find(lower(kErrorCategories[i]));
        if (p != std::string::npos && (best == std::string::npos || p < head.find(lower(kErrorCategories[best])))) best = i;
    }
    if (best == std::string::npos) {
        static const std::regex numbered(R"((?:^|\s|category\D{0,3})([1-6])(?:[.):]|\s|$))", std::regex::icase);
        std::smatch m;
        if (std::regex_search(head, m, numbered)) best = static_cast<std::size_t>(std::stoi(m[1].str()) - 1);
    }
    if (best != std::string::npos) out.category = std::string(kErrorCategories[best]);
    return out;
}

}  // namespace forge::llm
