#pragma once

// Reference implementations used only by tests. Each is written from the
// definition, as directly as possible, without sharing code with the
// library implementation it checks.

#include <algorithm>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace forge::oracle {

// Plain exponential recursion, no memo.
inline std::size_t levenshtein_naive(const std::vector<std::string>& a, std::size_t i,
                                     const std::vector<std::string>& b, std::size_t j) {
    if (i == a.size()) return b.size() - j;
    if (j == b.size()) return a.size() - i;
    if (a[i] == b[j]) return levenshtein_naive(a, i + 1, b, j + 1);
    return 1 + std::min({levenshtein_naive(a, i + 1, b, j), levenshtein_naive(a, i, b, j + 1),
                         levenshtein_naive(a, i + 1, b, j + 1)});
}

inline std::size_t levenshtein_naive(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    return levenshtein_naive(a, 0, b, 0);
}

// Full (|a|+1)x(|b|+1) table.
inline std::size_t levenshtein_table(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
    for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
    for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i)
        for (std::size_t j = 1; j <= b.size(); ++j)
            d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    return d[a.size()][b.size()];
}

inline double s_edit_table(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    const auto m = std::max(a.size(), b.size());
    return 1.0 - static_cast<double>(levenshtein_table(a, b)) / static_cast<double>(m);
}

// Max over every contiguous run of x's sentences against all of y, and every
// run of y's sentences against all of x. Sentences are given pre-tokenized.
inline double subspan_exhaustive(const std::vector<std::vector<std::string>>& xs,
                                 const std::vector<std::vector<std::string>>& ys) {
    auto flat = [](const std::vector<std::vector<std::string>>& s, std::size_t from, std::size_t to) {
        std::vector<std::string> out;
        for (std::size_t k = from; k <= to; ++k) out.insert(out.end(), s[k].begin(), s[k].end());
        return out;
    };
    const auto x_all = flat(xs, 0, xs.size() - 1);
    const auto y_all = flat(ys, 0, ys.size() - 1);
    double best = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = i; j < xs.size(); ++j) {
            const auto span = flat(xs, i, j);
            if (span.empty() && y_all.empty()) continue;
            best = std::max(best, s_edit_table(span, y_all));
        }
    for (std::size_t i = 0; i < ys.size(); ++i)
        for (std::size_t j = i; j < ys.size(); ++j) {
            const auto span = flat(ys, i, j);
            if (span.empty() && x_all.empty()) continue;
            best = std::max(best, s_edit_table(x_all, span));
        }
    return best;
}

// Longest common block by enumerating every (i, j) start pair; ties go to
// the smallest i, then the smallest j. Recurse left and right.
inline std::size_t matched_chars(std::string_view a, std::string_view b) {
    std::size_t bi = 0, bj = 0, bk = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) {
            std::size_t k = 0;
            while (i + k < a.size() && j + k < b.size() && a[i + k] == b[j + k]) ++k;
            if (k > bk) bi = i, bj = j, bk = k;
        }
    if (bk == 0) return 0;
    return bk + matched_chars(a.substr(0, bi), b.substr(0, bj)) +
           matched_chars(a.substr(bi + bk), b.substr(bj + bk));
}

inline double ratio_bruteforce(std::string_view a, std::string_view b) {
    if (a.empty() && b.empty()) return 1.0;
    return 2.0 * static_cast<double>(matched_chars(a, b)) / static_cast<double>(a.size() + b.size());
}

}  // namespace forge::oracle
