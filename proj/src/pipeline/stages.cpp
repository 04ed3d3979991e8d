#include "forge/pipeline/stages.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "forge/common/error.hpp"
#include "forge/textmatch/locate.hpp"
#include "forge/textmatch/normalize.hpp"
#include "forge/textmatch/words.hpp"

namespace forge::pipeline {

using llm::PromptVars;
using llm::TemplateId;

namespace {

llm::LlmResponse call(const StageContext& ctx, TemplateId id, const PromptVars& vars) {
    llm::LlmRequest req;
    req.model_id = ctx.model_id;
    req.template_id = id;
    req.prompt = llm::prompt_template(id).render(vars);
    req.max_retries = ctx.max_retries;
    return ctx.gateway.complete(req);
}

PromptVars filter_vars(const ErrorRecord& record, std::string_view latex) {
    return {{std::string(llm::slot::claim), record.claim},
            {std::string(llm::slot::original_text), joined_originals(record.generated)},
            {std::string(llm::slot::modified_text), joined_modified(record.generated)},
            {std::string(llm::slot::explanation), record.generated.explanation},
            {std::string(llm::slot::latex), std::string(latex)}};
}

// True when the verdict passes; an ambiguous answer does not.
bool run_filter(ErrorRecord& record, const corpus::PaperSource& paper, const StageContext& ctx, TemplateId id) {
    const auto reply = call(ctx, id, filter_vars(record, paper.latex));
    try {
        return llm::parse_verdict(reply.raw_text, llm::kNoChangesRequired, llm::kFilteringRequired);
    } catch (const VerdictError&) {
        spdlog::warn("{}: ambiguous {} verdict, filtering", record.error_id, llm::to_string(id));
        record.notes.push_back(fmt::format("{}: ambiguous verdict", llm::to_string(id)));
        return false;
    }
}

bool occurs_in(std::string_view excerpt, const std::string& norm_a, const std::string& norm_b,
               std::string_view modified_latex, double threshold) {
    const auto norm = textmatch::normalize_text(excerpt);
    if (norm.empty()) return false;
    if (norm_a.find(norm) != std::string::npos || norm_b.find(norm) != std::string::npos) return true;
    return textmatch::fuzzy_locate(modified_latex, excerpt).ratio > threshold;
}

std::string join(const llm::GeneratedError& error, bool original) {
    std::string out;
    for (const auto& p : error.pairs) {
        if (!out.empty()) out += "\n\n";
        out += original ? p.original_text : p.modified_text;
    }
    return out;
}

}  // namespace

std::string joined_originals(const llm::GeneratedError& error) { return join(error, true); }
std::string joined_modified(const llm::GeneratedError& error) { return join(error, false); }

ClaimExtraction extract_claims(const corpus::PaperSource& paper, const StageContext& ctx, std::size_t max_claims) {
    ClaimExtraction out;
    const auto reply = call(ctx, TemplateId::claim_extraction, {{std::string(llm::slot::latex), paper.latex}});
    if (reply.refusal) {
        out.error = "refusal";
        return out;
    }
    std::vector<std::string> texts;
    try {
        texts = llm::parse_claims(reply.raw_text);
    } catch (const ParseError& e) {
        out.error = fmt::format("parse_error: {} ({})", e.what(), e.raw());
        return out;
    }
    if (max_claims > 0 && texts.size() > max_claims) texts.resize(max_claims);
    std::vector<std::string> keys;
    for (std::size_t i = 0; i < texts.size(); ++i) {
        Claim c{paper.paper_id, static_cast<int>(i + 1), texts[i], std::nullopt};
        auto key = textmatch::normalize_text(texts[i]);
        std::transform(key.begin(), key.end(), key.begin(), [](unsigned char ch) { return std::tolower(ch); });
        if (auto it = std::find(keys.begin(), keys.end(), key); it != keys.end()) {
            c.duplicate_of = static_cast<int>(it - keys.begin()) + 1;
            spdlog::info("{}: claim {} duplicates claim {}; kept", paper.paper_id, c.claim_index, *c.duplicate_of);
        }
        keys.push_back(std::move(key));
        out.claims.push_back(std::move(c));
    }
    return out;
}

GenerationOutcome generate_error(const corpus::PaperSource& paper, const Claim& claim, const StageContext& ctx,
                                 const std::string& error_id) {
    if (claim.paper_id != paper.paper_id) throw ContractError("claim does not belong to " + paper.paper_id);
    GenerationOutcome out;
    const auto reply = call(ctx, TemplateId::error_generation,
                            {{std::string(llm::slot::latex), paper.latex}, {std::string(llm::slot::claim), claim.text}});
    if (reply.refusal) {
        out.drop_reason = "refusal";
        return out;
    }
    ErrorRecord r;
    try {
        r.generated = llm::parse_generated_error(reply.raw_text);
    } catch (const ParseError& e) {
        out.drop_reason = fmt::format("parse_error: {}", e.what());
        return out;
    }
    r.error_id = error_id;
    r.paper_id = paper.paper_id;
    r.claim_index = claim.claim_index;
    r.claim = claim.text;
    r.insertion_model_id = ctx.model_id;
    r.status = ErrorStatus::generated;
    out.record = std::move(r);
    return out;
}

void filter_invalid(ErrorRecord& record, const corpus::PaperSource& paper, const StageContext& ctx) {
    if (record.status != ErrorStatus::generated || record.invalid_filter_passed)
        throw ContractError(record.error_id + ": invalid filter needs a freshly generated record");
    const bool pass = run_filter(record, paper, ctx, TemplateId::invalid_filter);
    record.invalid_filter_passed = pass;
    if (!pass) record.status = ErrorStatus::invalid_filtered;
}

void filter_easy_prompt(ErrorRecord& record, const corpus::PaperSource& paper, const StageContext& ctx) {
    if (record.status != ErrorStatus::generated || record.invalid_filter_passed != true || record.easy_filter_passed)
        throw ContractError(record.error_id + ": easy filter runs after the invalid filter");
    const bool pass = run_filter(record, paper, ctx, TemplateId::easy_filter);
    record.easy_filter_passed = pass;
    if (!pass) record.status = ErrorStatus::easy_prompt_filtered;
}

InsertionResult insert_error(std::string_view latex, const llm::GeneratedError& error, double threshold) {
    InsertionResult out;
    const auto n = error.pairs.size();

    // Document order by where each original sits in the untouched source.
    std::vector<std::size_t> first_pos(n);
    for (std::size_t i = 0; i < n; ++i) first_pos[i] = textmatch::fuzzy_locate(latex, error.pairs[i].original_text).char_start;
    out.order.resize(n);
    std::iota(out.order.begin(), out.order.end(), 0);
    std::stable_sort(out.order.begin(), out.order.end(),
                     [&](std::size_t a, std::size_t b) { return first_pos[a] < first_pos[b]; });

    std::string text(latex);
    std::size_t cursor = 0;
    bool ok = true;
    for (const auto i : out.order) {
        const auto& pair = error.pairs[i];
        auto span = textmatch::fuzzy_locate(std::string_view(text).substr(cursor), pair.original_text);
        span.char_start += cursor;
        span.char_end += cursor;
        const bool accepted = span.exact || span.ratio > threshold;
        out.spans.push_back({i, span.char_start, span.char_end, span.ratio, span.exact, accepted});
        if (!accepted) {
            ok = false;
            continue;
        }
        text = textmatch::replace_span(text, span, pair.modified_text);
        cursor = span.char_start + pair.modified_text.size();
    }
    out.ok = ok;
    if (ok) out.latex = std::move(text);
    return out;
}

std::string revert_insertion(std::string_view modified_latex, const InsertionResult& result,
                             const llm::GeneratedError& error) {
    if (!result.ok) throw ContractError("cannot revert a failed insertion");
    std::string text(modified_latex);
    for (auto it = result.spans.rbegin(); it != result.spans.rend(); ++it) {
        const auto& pair = error.pairs.at(it->pair_index);
        textmatch::LocatedSpan span{it->char_start, it->char_start + pair.modified_text.size(), 1.0, true};
        text = textmatch::replace_span(text, span, pair.original_text);
    }
    return text;
}

std::optional<std::string> apply_insertion(ErrorRecord& record, const corpus::PaperSource& paper, double threshold) {
    if (record.status != ErrorStatus::generated || record.easy_filter_passed != true)
        throw ContractError(record.error_id + ": insertion runs after both prompt filters");
    auto result = insert_error(paper.latex, record.generated, threshold);
    record.insertion = result.spans;
    if (!result.ok) {
        record.status = ErrorStatus::insert_failed;
        for (const auto& s : result.spans)
            if (!s.accepted)
                record.notes.push_back(fmt::format("insertion: pair {} best ratio {:.3f}", s.pair_index + 1, s.ratio));
        return std::nullopt;
    }
    return std::move(result.latex);
}

void localize_error(ErrorRecord& record, const corpus::PaperSource& paper, std::string_view modified_latex,
                    const StageContext& ctx) {
    if (record.status != ErrorStatus::generated) throw ContractError(record.error_id + ": localization before insertion");
    GroundTruthSet gt;
    for (const auto& p : record.generated.pairs) gt.add(p.modified_text, Provenance::modified);

    const auto reply = call(ctx, TemplateId::localization, filter_vars(record, modified_latex));
    try {
        const auto loc = llm::parse_localization(reply.raw_text);
        if (!loc.category.empty()) record.category = loc.category;
        const auto norm_modified = textmatch::normalize_text(modified_latex);
        const auto norm_original = textmatch::normalize_text(paper.latex);
        for (const auto& excerpt : loc.excerpts) {
            if (!occurs_in(excerpt, norm_modified, norm_original, modified_latex, ctx.replace_threshold)) {
                record.notes.push_back("localization: dropped excerpt not found in source");
                continue;
            }
            gt.add(excerpt, Provenance::localized);
        }
    } catch (const ParseError&) {
        spdlog::warn("{}: localization unparseable, ground truth = modified excerpts", record.error_id);
        record.notes.push_back("localization: no excerpts parsed");
    }
    if (gt.empty()) throw ContractError(record.error_id + ": empty ground truth");
    record.ground_truth = std::move(gt);
    record.status = ErrorStatus::localized;
}

std::size_t ground_truth_word_limit(const GroundTruthSet& ground_truth) {
    std::size_t limit = 1;
    for (const auto& e : ground_truth.excerpts) limit = std::max(limit, textmatch::word_count(e.text));
    return limit;
}

void internal_identify(ErrorRecord& record, std::string_view modified_latex, const StageContext& ctx) {
    if (record.status != ErrorStatus::localized) throw ContractError(record.error_id + ": internal identification before localization");
    const auto limit = ground_truth_word_limit(record.ground_truth);
    const auto reply = call(ctx, TemplateId::internal_identification,
                            {{std::string(llm::slot::word_limit), std::to_string(limit)},
                             {std::string(llm::slot::latex), std::string(modified_latex)}});
    record.internal_excerpts = reply.refusal ? std::vector<std::string>{} : llm::parse_identification(reply.raw_text);
    const auto gt = record.ground_truth.texts();
    const auto match = textmatch::is_identified(gt, record.internal_excerpts, ctx.identify_threshold);
    record.internal_score = match.score;
    record.status = match.matched ? ErrorStatus::internally_identified : ErrorStatus::survived;
}

}  // namespace forge::pipeline
