#include "forge/textmatch/locate.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <fmt/format.h>

#include "forge/common/error.hpp"
#include "forge/textmatch/ratio.hpp"

namespace forge::textmatch {

LocatedSpan fuzzy_locate(std::string_view source, std::string_view needle) {
    if (source.empty() || needle.empty()) throw ContractError("fuzzy_locate: source and needle must be non-empty");

    if (const auto hit = source.find(needle); hit != std::string_view::npos) {
        return {hit, hit + needle.size(), 1.0, true};
    }

    const std::size_t len = needle.size();
    const auto min_len = static_cast<std::size_t>(std::floor(0.8 * static_cast<double>(len)));
    const auto max_len = static_cast<std::size_t>(std::ceil(1.2 * static_cast<double>(len)));

    std::vector<std::size_t> line_ends;
    for (std::size_t i = 0; i < source.size(); ++i) {
        if (source[i] == '\n') line_ends.push_back(i);
    }
    line_ends.push_back(source.size());

    LocatedSpan best{0, std::min(len, source.size()), -1.0, false};
    std::vector<std::size_t> ends;
    auto consider_start = [&](std::size_t start) {
        ends.clear();
        ends.push_back(std::min(start + len, source.size()));
        auto it = std::lower_bound(line_ends.begin(), line_ends.end(), start + std::max<std::size_t>(min_len, 1));
        for (; it != line_ends.end() && *it <= start + max_len; ++it) ends.push_back(*it);
        std::sort(ends.begin(), ends.end());
        ends.erase(std::unique(ends.begin(), ends.end()), ends.end());
        for (std::size_t end : ends) {
            if (end <= start) continue;
            const auto window = source.substr(start, end - start);
            if (best.ratio >= 0.0 && quick_ratio(window, needle) <= best.ratio) continue;
            const double r = ratio_similarity(window, needle);
            if (r > best.ratio) best = {start, end, r, false};
        }
    };

    consider_start(0);
    for (std::size_t i = 0; i + 1 < line_ends.size(); ++i) {
        if (line_ends[i] + 1 < source.size()) consider_start(line_ends[i] + 1);
    }
    best.ratio = std::max(best.ratio, 0.0);
    return best;
}

std::string replace_span(std::string_view source, const LocatedSpan& span, std::string_view replacement) {
    if (span.char_start > span.char_end || span.char_end > source.size()) {
        throw BoundsError(fmt::format("replace_span: [{}, {}) outside source of length {}", span.char_start,
                                      span.char_end, source.size()));
    }
    std::string out;
    out.reserve(source.size() - (span.char_end - span.char_start) + replacement.size());
    out.append(source.substr(0, span.char_start));
    out.append(replacement);
    out.append(source.substr(span.char_end));
    return out;
}

}  // namespace forge::textmatch
