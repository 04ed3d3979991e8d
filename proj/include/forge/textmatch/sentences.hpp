#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace forge::textmatch {

// Splits normalized text after '.', '!' or '?' when followed by a space and an
// uppercase letter, or by the end of the text. Never splits inside a math
// group or after a known abbreviation ("Eq.", "Fig.", "et al.", ...).
// Joining the result with single spaces reproduces normalize_text(text).
std::vector<std::string> split_sentences(std::string_view text);

}  // namespace forge::textmatch
