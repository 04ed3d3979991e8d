#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace forge::corpus {

struct FlattenResult {
    std::string latex;
    std::vector<std::string> unresolved;  // directive targets left verbatim
    std::vector<std::string> included;    // auxiliary files spliced, in order
};

inline constexpr int kMaxIncludeDepth = 10;

// Splices \input{..} and \include{..} targets found in `auxiliary_files`
// (with or without the .tex extension) in place of the directive,
// recursively. Directives inside comments are ignored. Throws CycleError
// with the inclusion path on a cycle, DepthError beyond kMaxIncludeDepth
// nested levels, ContractError if main has no \begin{document}.
FlattenResult flatten_latex(std::string_view main_file,
                            const std::map<std::string, std::string>& auxiliary_files,
                            const std::string& main_name = "main.tex");

}  // namespace forge::corpus
