#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace forge::textmatch {

struct MatchingBlock {
    std::size_t a = 0;
    std::size_t b = 0;
    std::size_t size = 0;
    friend bool operator==(const MatchingBlock&, const MatchingBlock&) = default;
};

// Recursive longest-common-block decomposition (no junk heuristic): take the
// longest common block (earliest in `a`, then earliest in `b`), recurse on the
// pieces to its left and right. Blocks are returned sorted, adjacent blocks
// merged, without the zero-size sentinel.
std::vector<MatchingBlock> matching_blocks(std::string_view a, std::string_view b);

// 2*M / (|a| + |b|) over bytes, M the total size of the matching blocks.
// Two empty strings are identical: 1.0.
double ratio_similarity(std::string_view a, std::string_view b);

// Upper bound on ratio_similarity from byte multiset intersection.
double quick_ratio(std::string_view a, std::string_view b);

}  // namespace forge::textmatch
