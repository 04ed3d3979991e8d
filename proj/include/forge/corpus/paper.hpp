#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

namespace forge::corpus {

struct PaperSource {
    std::string paper_id;
    std::string title;
    std::string arxiv_id;
    std::string latex;       // flattened, single compilable document
    std::string fetched_at;  // ISO-8601 UTC
};

// Throws ContractError unless latex is non-empty with exactly one
// \begin{document} and one \end{document}.
void validate_paper(const PaperSource& paper);

std::size_t count_occurrences(std::string_view haystack, std::string_view needle);

// Best-effort \title{...} extraction; empty when absent.
std::string extract_title(std::string_view latex);

void to_json(nlohmann::json& j, const PaperSource& p);
void from_json(const nlohmann::json& j, PaperSource& p);

}  // namespace forge::corpus
