#include "forge/pipeline/records.hpp"

#include <array>
#include <utility>

#include "forge/common/error.hpp"
#include "forge/common/fs.hpp"
#include "forge/textmatch/normalize.hpp"

namespace forge::pipeline {

namespace {

constexpr std::array<std::pair<Stage, std::string_view>, kStageCount> kStageNames{{
    {Stage::claim_extraction, "claim_extraction"},
    {Stage::error_generation, "error_generation"},
    {Stage::invalid_filter, "invalid_filter"},
    {Stage::easy_filter, "easy_filter"},
    {Stage::insertion, "insertion"},
    {Stage::localization, "localization"},
    {Stage::internal_identification, "internal_identification"},
    {Stage::compilation, "compilation"},
}};

constexpr std::array<std::pair<ErrorStatus, std::string_view>, 10> kStatusNames{{
    {ErrorStatus::generated, "generated"},
    {ErrorStatus::invalid_filtered, "invalid_filtered"},
    {ErrorStatus::easy_prompt_filtered, "easy_prompt_filtered"},
    {ErrorStatus::insert_failed, "insert_failed"},
    {ErrorStatus::localized, "localized"},
    {ErrorStatus::internally_identified, "internally_identified"},
    {ErrorStatus::survived, "survived"},
    {ErrorStatus::compile_failed, "compile_failed"},
    {ErrorStatus::compiled, "compiled"},
    {ErrorStatus::excluded, "excluded"},
}};

std::string_view provenance_name(Provenance p) {
    return p == Provenance::modified ? "modified" : "localized";
}

Provenance provenance_from(std::string_view s) {
    if (s == "modified") return Provenance::modified;
    if (s == "localized") return Provenance::localized;
    throw ParseError("unknown ground-truth provenance", std::string(s));
}

}  // namespace

std::string_view to_string(Stage s) {
    for (const auto& [stage, name] : kStageNames)
        if (stage == s) return name;
    return "?";
}

Stage stage_from_string(std::string_view s) {
    for (const auto& [stage, name] : kStageNames)
        if (name == s) return stage;
    throw LookupError("unknown stage: " + std::string(s));
}

std::string_view to_string(ErrorStatus s) {
    for (const auto& [status, name] : kStatusNames)
        if (status == s) return name;
    return "?";
}

ErrorStatus status_from_string(std::string_view s) {
    for (const auto& [status, name] : kStatusNames)
        if (name == s) return status;
    throw LookupError("unknown error status: " + std::string(s));
}

bool is_terminal(ErrorStatus s) {
    switch (s) {
        case ErrorStatus::generated:
        case ErrorStatus::localized:
        case ErrorStatus::survived:
            return false;
        default:
            return true;
    }
}

bool GroundTruthSet::add(std::string text, Provenance provenance) {
    const auto key = textmatch::normalize_text(text);
    if (key.empty()) return false;
    for (const auto& e : excerpts)
        if (textmatch::normalize_text(e.text) == key) return false;
    excerpts.push_back({std::move(text), provenance});
    return true;
}

std::vector<std::string> GroundTruthSet::texts() const {
    std::vector<std::string> out;
    out.reserve(excerpts.size());
    for (const auto& e : excerpts) out.push_back(e.text);
    return out;
}

std::optional<Stage> ErrorRecord::removed_at() const {
    switch (status) {
        case ErrorStatus::invalid_filtered: return Stage::invalid_filter;
        case ErrorStatus::easy_prompt_filtered: return Stage::easy_filter;
        case ErrorStatus::insert_failed: return Stage::insertion;
        case ErrorStatus::internally_identified: return Stage::internal_identification;
        case ErrorStatus::compile_failed: return Stage::compilation;
        case ErrorStatus::excluded: return excluded_at.value_or(Stage::error_generation);
        default: return std::nullopt;
    }
}

std::string make_error_id(std::string_view paper_id, int claim_index, std::string_view model_id, int n) {
    return std::string(paper_id) + ".c" + std::to_string(claim_index) + "." + slugify(model_id) + ".e" +
           std::to_string(n);
}

std::string make_pair_id(std::string_view error_id) { return "pair-" + std::string(error_id); }

void to_json(nlohmann::json& j, const Claim& c) {
    j = {{"paper_id", c.paper_id}, {"claim_index", c.claim_index}, {"text", c.text}};
    if (c.duplicate_of) j["duplicate_of"] = *c.duplicate_of;
}

void from_json(const nlohmann::json& j, Claim& c) {
    c.paper_id = j.at("paper_id").get<std::string>();
    c.claim_index = j.at("claim_index").get<int>();
    c.text = j.at("text").get<std::string>();
    c.duplicate_of.reset();
    if (j.contains("duplicate_of")) c.duplicate_of = j["duplicate_of"].get<int>();
}

void to_json(nlohmann::json& j, const GroundTruthSet& g) {
    j = nlohmann::json::array();
    for (const auto& e : g.excerpts) j.push_back({{"text", e.text}, {"provenance", provenance_name(e.provenance)}});
}

void from_json(const nlohmann::json& j, GroundTruthSet& g) {
    g.excerpts.clear();
    for (const auto& e : j)
        g.excerpts.push_back({e.at("text").get<std::string>(), provenance_from(e.at("provenance").get<std::string>())});
}

void to_json(nlohmann::json& j, const ErrorRecord& r) {
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& p : r.generated.pairs)
        pairs.push_back({{"original_text", p.original_text}, {"modified_text", p.modified_text}});
    j = {{"error_id", r.error_id},
         {"paper_id", r.paper_id},
         {"claim_index", r.claim_index},
         {"claim", r.claim},
         {"insertion_model_id", r.insertion_model_id},
         {"generated", {{"pairs", pairs}, {"explanation", r.generated.explanation}}},
         {"status", to_string(r.status)}};
    if (r.category) j["category"] = *r.category;
    if (r.invalid_filter_passed) j["invalid_filter_passed"] = *r.invalid_filter_passed;
    if (r.easy_filter_passed) j["easy_filter_passed"] = *r.easy_filter_passed;
    if (!r.insertion.empty()) {
        auto& spans = j["insertion"] = nlohmann::json::array();
        for (const auto& s : r.insertion)
            spans.push_back({{"pair_index", s.pair_index},
                             {"char_start", s.char_start},
                             {"char_end", s.char_end},
                             {"ratio", s.ratio},
                             {"exact", s.exact},
                             {"accepted", s.accepted}});
    }
    if (!r.ground_truth.empty()) j["ground_truth"] = r.ground_truth;
    if (r.status == ErrorStatus::internally_identified || r.status == ErrorStatus::survived ||
        r.status == ErrorStatus::compiled || r.status == ErrorStatus::compile_failed) {
        j["internal_identification"] = {{"excerpts", r.internal_excerpts}, {"score", r.internal_score}};
    }
    if (r.excluded_at) j["excluded_at"] = to_string(*r.excluded_at);
    if (!r.pdf_path.empty()) j["pdf_path"] = r.pdf_path;
    if (!r.compile_log.empty()) j["compile_log"] = r.compile_log;
    if (!r.notes.empty()) j["notes"] = r.notes;
}

void from_json(const nlohmann::json& j, ErrorRecord& r) {
    r = ErrorRecord{};
    r.error_id = j.at("error_id").get<std::string>();
    r.paper_id = j.at("paper_id").get<std::string>();
    r.claim_index = j.at("claim_index").get<int>();
    r.claim = j.at("claim").get<std::string>();
    r.insertion_model_id = j.at("insertion_model_id").get<std::string>();
    for (const auto& p : j.at("generated").at("pairs"))
        r.generated.pairs.push_back({p.at("original_text").get<std::string>(), p.at("modified_text").get<std::string>()});
    r.generated.explanation = j.at("generated").at("explanation").get<std::string>();
    r.status = status_from_string(j.at("status").get<std::string>());
    if (j.contains("category")) r.category = j["category"].get<std::string>();
    if (j.contains("invalid_filter_passed")) r.invalid_filter_passed = j["invalid_filter_passed"].get<bool>();
    if (j.contains("easy_filter_passed")) r.easy_filter_passed = j["easy_filter_passed"].get<bool>();
    if (j.contains("insertion")) {
        for (const auto& s : j["insertion"])
            r.insertion.push_back({s.at("pair_index").get<std::size_t>(), s.at("char_start").get<std::size_t>(),
                                   s.at("char_end").get<std::size_t>(), s.at("ratio").get<double>(),
                                   s.at("exact").get<bool>(), s.at("accepted").get<bool>()});
    }
    if (j.contains("ground_truth")) r.ground_truth = j["ground_truth"].get<GroundTruthSet>();
    if (j.contains("internal_identification")) {
        r.internal_excerpts = j["internal_identification"].at("excerpts").get<std::vector<std::string>>();
        r.internal_score = j["internal_identification"].at("score").get<double>();
    }
    if (j.contains("excluded_at")) r.excluded_at = stage_from_string(j["excluded_at"].get<std::string>());
    if (j.contains("pdf_path")) r.pdf_path = j["pdf_path"].get<std::string>();
    if (j.contains("compile_log")) r.compile_log = j["compile_log"].get<std::string>();
    if (j.contains("notes")) r.notes = j["notes"].get<std::vector<std::string>>();
}

void to_json(nlohmann::json& j, const PaperErrorPair& p) {
    j = {{"pair_id", p.pair_id},
         {"paper_id", p.paper_id},
         {"error_id", p.error_id},
         {"insertion_model_id", p.insertion_model_id},
         {"claim", p.claim},
         {"category", p.category},
         {"explanation", p.explanation},
         {"modified_latex_path", p.modified_latex_path},
         {"modified_latex_sha256", p.modified_latex_sha256},
         {"pdf_path", p.pdf_path},
         {"ground_truth", p.ground_truth}};
}

void from_json(const nlohmann::json& j, PaperErrorPair& p) {
    p.pair_id = j.at("pair_id").get<std::string>();
    p.paper_id = j.at("paper_id").get<std::string>();
    p.error_id = j.at("error_id").get<std::string>();
    p.insertion_model_id = j.at("insertion_model_id").get<std::string>();
    p.claim = j.value("claim", "");
    p.category = j.value("category", "");
    p.explanation = j.value("explanation", "");
    p.modified_latex_path = j.value("modified_latex_path", "");
    p.modified_latex_sha256 = j.value("modified_latex_sha256", "");
    p.pdf_path = j.at("pdf_path").get<std::string>();
    p.ground_truth = j.at("ground_truth").get<GroundTruthSet>();
    if (p.ground_truth.empty()) throw ParseError("pair has no ground truth", j.dump());
}

}  // namespace forge::pipeline
