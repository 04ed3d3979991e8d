#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace forge::textmatch {

// Byte offsets [char_start, char_end) into a source text.
struct LocatedSpan {
    std::size_t char_start = 0;
    std::size_t char_end = 0;
    double ratio = 0.0;
    bool exact = false;
};

// Verbatim occurrence first. Otherwise windows starting at line starts, of
// length |needle| or ending at a line end within |needle| +-20%, scored by
// ratio_similarity; the first best window wins. Always returns a span; the
// caller applies its acceptance threshold.
LocatedSpan fuzzy_locate(std::string_view source, std::string_view needle);

// Throws BoundsError if the span does not fit `source`.
std::string replace_span(std::string_view source, const LocatedSpan& span, std::string_view replacement);

}  // namespace forge::textmatch
