#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace forge::textmatch {

// Canonical form shared by both sides of every comparison, whether the text
// came from LaTeX source or from a PDF:
//   - whole-line LaTeX comments ('%' as first non-blank) are dropped
//   - "identifi-\ncation" style line-break hyphenation is rejoined
//   - \emph{..}, \textbf{..}, \textit{..}, \texttt{..}, \textsc{..},
//     \textrm{..}, \textsf{..}, \underline{..} keep only their argument
//   - '~' becomes a space
//   - whitespace runs collapse to one space; the result is trimmed
// Case is preserved (sentence splitting needs it).
std::string normalize_text(std::string_view raw);

// If a math group starts at `pos` ($..$, $$..$$, \(..\), \[..\]) returns the
// index one past its closing delimiter, otherwise std::string_view::npos.
// An unterminated opener is not a math group.
std::size_t math_group_end(std::string_view text, std::size_t pos);

}  // namespace forge::textmatch
