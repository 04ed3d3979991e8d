#include "forge/textmatch/levenshtein.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "forge/common/error.hpp"

namespace forge::textmatch {

std::size_t levenshtein_words(std::span<const std::string> a, std::span<const std::string> b) {
    if (a.size() < b.size()) std::swap(a, b);
    if (b.empty()) return a.size();

    std::vector<std::size_t> prev(b.size() + 1);
    std::vector<std::size_t> cur(b.size() + 1);
    std::iota(prev.begin(), prev.end(), std::size_t{0});
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

double s_edit(std::span<const std::string> a, std::span<const std::string> b) {
    if (a.empty() && b.empty()) throw UndefinedInputError("s_edit: both word sequences are empty");
    const auto longest = std::max(a.size(), b.size());
    return 1.0 - static_cast<double>(levenshtein_words(a, b)) / static_cast<double>(longest);
}

}  // namespace forge::textmatch
