#include "forge/textmatch/ratio.hpp"

#include <algorithm>
#include <array>
#include <tuple>

namespace forge::textmatch {

namespace {

// Longest common block search over a[alo, ahi) x b[blo, bhi) using the
// positions of each byte in b. Row i keeps, for every j, the length of the
// common run ending at (i, j); ties keep the earliest i, then the earliest j.
class LongestMatchFinder {
public:
    LongestMatchFinder(std::string_view a, std::string_view b) : a_(a), b_(b) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            positions_[static_cast<unsigned char>(b[j])].push_back(j);
        }
        prev_.assign(b.size() + 1, 0);
        cur_.assign(b.size() + 1, 0);
    }

    MatchingBlock find(std::size_t alo, std::size_t ahi, std::size_t blo, std::size_t bhi) {
        MatchingBlock best{alo, blo, 0};
        for (std::size_t i = alo; i < ahi; ++i) {
            touched_cur_.clear();
            for (std::size_t j : positions_[static_cast<unsigned char>(a_[i])]) {
                if (j < blo) continue;
                if (j >= bhi) break;
                const std::size_t k = prev_[j] + 1;
                cur_[j + 1] = k;
                touched_cur_.push_back(j + 1);
                if (k > best.size) best = {i + 1 - k, j + 1 - k, k};
            }
            for (std::size_t idx : touched_prev_) prev_[idx] = 0;
            std::swap(prev_, cur_);
            std::swap(touched_prev_, touched_cur_);
        }
        for (std::size_t idx : touched_prev_) prev_[idx] = 0;
        touched_prev_.clear();
        return best;
    }

private:
    std::string_view a_;
    std::string_view b_;
    std::array<std::vector<std::size_t>, 256> positions_;
    std::vector<std::size_t> prev_;
    std::vector<std::size_t> cur_;
    std::vector<std::size_t> touched_prev_;
    std::vector<std::size_t> touched_cur_;
};

}  // namespace

std::vector<MatchingBlock> matching_blocks(std::string_view a, std::string_view b) {
    LongestMatchFinder finder(a, b);
    std::vector<MatchingBlock> blocks;
    std::vector<std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>> pending{{0, a.size(), 0, b.size()}};
    while (!pending.empty()) {
        const auto [alo, ahi, blo, bhi] = pending.back();
        pending.pop_back();
        const auto m = finder.find(alo, ahi, blo, bhi);
        if (m.size == 0) continue;
        blocks.push_back(m);
        if (alo < m.a && blo < m.b) pending.emplace_back(alo, m.a, blo, m.b);
        if (m.a + m.size < ahi && m.b + m.size < bhi) pending.emplace_back(m.a + m.size, ahi, m.b + m.size, bhi);
    }
    std::sort(blocks.begin(), blocks.end(),
              [](const MatchingBlock& x, const MatchingBlock& y) { return std::tie(x.a, x.b) < std::tie(y.a, y.b); });

    std::vector<MatchingBlock> merged;
    for (const auto& blk : blocks) {
        if (!merged.empty() && merged.back().a + merged.back().size == blk.a &&
            merged.back().b + merged.back().size == blk.b) {
            merged.back().size += blk.size;
        } else {
            merged.push_back(blk);
        }
    }
    return merged;
}

double ratio_similarity(std::string_view a, std::string_view b) {
    const auto total = a.size() + b.size();
    if (total == 0) return 1.0;
    std::size_t matched = 0;
    for (const auto& blk : matching_blocks(a, b)) matched += blk.size;
    return 2.0 * static_cast<double>(matched) / static_cast<double>(total);
}

double quick_ratio(std::string_view a, std::string_view b) {
    const auto total = a.size() + b.size();
    if (total == 0) return 1.0;
    std::array<std::size_t, 256> avail{};
    for (char c : b) ++avail[static_cast<unsigned char>(c)];
    std::size_t matched = 0;
    for (char c : a) {
        auto& n = avail[static_cast<unsigned char>(c)];
        if (n > 0) {
            --n;
            ++matched;
        }
    }
    return 2.0 * static_cast<double>(matched) / static_cast<double>(total);
}

}  // namespace forge::textmatch
