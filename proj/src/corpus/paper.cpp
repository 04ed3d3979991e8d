#include "forge/corpus/paper.hpp"

#include <fmt/format.h>

#include "forge/common/error.hpp"

namespace forge::corpus {

std::size_t count_occurrences(std::string_view haystack, std::string_view needle) {
    if (needle.empty()) return 0;
    std::size_t n = 0;
    for (auto pos = haystack.find(needle); pos != std::string_view::npos; pos = haystack.find(needle, pos + needle.size())) ++n;
    return n;
}

void validate_paper(const PaperSource& paper) {
    if (paper.latex.empty()) throw ContractError(fmt::format("paper {}: empty LaTeX", paper.paper_id));
    const auto begins = count_occurrences(paper.latex, "\\begin{document}");
    const auto ends = count_occurrences(paper.latex, "\\end{document}");
    if (begins != 1 || ends != 1) {
        throw ContractError(fmt::format("paper {}: expected one document environment, found {} begin / {} end",
                                        paper.paper_id, begins, ends));
    }
}

std::string extract_title(std::string_view latex) {
    const auto pos = latex.find("\\title");
    if (pos == std::string_view::npos) return {};
    auto open = latex.find('{', pos);
    if (open == std::string_view::npos) return {};
    int depth = 0;
    std::string out;
    for (std::size_t i = open; i < latex.size(); ++i) {
        const char c = latex[i];
        if (c == '{') {
            if (depth++ == 0) continue;
        } else if (c == '}') {
            if (--depth == 0) break;
        }
        out.push_back(c);
    }
    return out;
}

void to_json(nlohmann::json& j, const PaperSource& p) {
    j = nlohmann::json{{"paper_id", p.paper_id},
                       {"title", p.title},
                       {"arxiv_id", p.arxiv_id},
                       {"latex", p.latex},
                       {"fetched_at", p.fetched_at}};
}

void from_json(const nlohmann::json& j, PaperSource& p) {
    p.paper_id = j.at("paper_id").get<std::string>();
    p.title = j.value("title", "");
    p.arxiv_id = j.value("arxiv_id", "");
    p.latex = j.at("latex").get<std::string>();
    p.fetched_at = j.value("fetched_at", "");
}

}  // namespace forge::corpus
