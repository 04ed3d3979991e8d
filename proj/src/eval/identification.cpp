#include "forge/eval/identification.hpp"

#include <algorithm>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "forge/common/error.hpp"
#include "forge/common/fs.hpp"
#include "forge/corpus/pdf_text.hpp"
#include "forge/llm/parsers.hpp"
#include "forge/textmatch/words.hpp"

namespace forge::eval {

using llm::PromptVars;
using llm::TemplateId;

void to_json(nlohmann::json& j, const IdentificationRun& r) {
    auto scores = nlohmann::json::array();
    for (const auto& s : r.per_excerpt)
        scores.push_back({{"lev_score", s.lev_score}, {"lev_match", s.lev_match}, {"judge_match", s.judge_match}});
    j = {{"pair_id", r.pair_id},
         {"identification_model_id", r.identification_model_id},
         {"insertion_model_id", r.insertion_model_id},
         {"word_limit", r.word_limit},
         {"excerpts", r.excerpts},
         {"per_excerpt", scores},
         {"refusal", r.refusal},
         {"truncated", r.truncated},
         {"dropped", r.dropped},
         {"scored", r.scored},
         {"judge_model_id", r.judge_model_id},
         {"judge_failed", r.judge_failed}};
}

void from_json(const nlohmann::json& j, IdentificationRun& r) {
    r.pair_id = j.at("pair_id").get<std::string>();
    r.identification_model_id = j.at("identification_model_id").get<std::string>();
    r.insertion_model_id = j.at("insertion_model_id").get<std::string>();
    r.word_limit = j.value("word_limit", std::size_t{0});
    r.excerpts = j.at("excerpts").get<std::vector<std::string>>();
    r.per_excerpt.clear();
    for (const auto& s : j.value("per_excerpt", nlohmann::json::array()))
        r.per_excerpt.push_back({s.at("lev_score").get<double>(), s.at("lev_match").get<bool>(), s.at("judge_match").get<bool>()});
    r.refusal = j.value("refusal", false);
    r.truncated = j.value("truncated", std::size_t{0});
    r.dropped = j.value("dropped", std::size_t{0});
    r.scored = j.value("scored", false);
    r.judge_model_id = j.value("judge_model_id", "");
    r.judge_failed = j.value("judge_failed", false);
    if (r.excerpts.size() > llm::kMaxExcerpts) throw ContractError(r.pair_id + ": more than 10 excerpts");
    if (r.scored && r.per_excerpt.size() != r.excerpts.size())
        throw ContractError(r.pair_id + ": scores do not line up with excerpts");
}

std::size_t compute_word_limit(const pipeline::PaperErrorPair& pair) {
    if (pair.ground_truth.empty()) throw ContractError(pair.pair_id + ": empty ground truth");
    std::size_t limit = 0;
    for (const auto& e : pair.ground_truth.excerpts) limit = std::max(limit, textmatch::word_count(e.text));
    return std::max<std::size_t>(limit, 1);
}

IdentificationRun run_identification(const pipeline::PaperErrorPair& pair, const std::filesystem::path& data_root,
                                     llm::Gateway& gateway, const std::string& model_id, int max_retries) {
    IdentificationRun run;
    run.pair_id = pair.pair_id;
    run.identification_model_id = model_id;
    run.insertion_model_id = pair.insertion_model_id;
    run.word_limit = compute_word_limit(pair);

    const auto pdf = read_file(data_root / pair.pdf_path);
    const auto& tmpl = llm::prompt_template(TemplateId::identification);
    PromptVars vars{{std::string(llm::slot::word_limit), std::to_string(run.word_limit)}};
    llm::LlmRequest req;
    req.model_id = model_id;
    req.template_id = TemplateId::identification;
    req.max_retries = max_retries;
    if (gateway.supports_pdf(model_id)) {
        req.prompt = tmpl.render(vars, false);
        req.attachment_pdf = pdf;
    } else {
        vars[std::string(llm::slot::paper_text)] = corpus::extract_pdf_text_from_bytes(pdf);
        req.prompt = tmpl.render(vars);
    }
    const auto reply = gateway.complete(req);
    if (reply.refusal) {
        run.refusal = true;
        return run;
    }
    auto parsed = llm::parse_identification_detailed(reply.raw_text);
    run.dropped = parsed.dropped;
    for (auto& excerpt : parsed.excerpts) {
        if (textmatch::word_count(excerpt) > run.word_limit) {
            excerpt = textmatch::truncate_to_words(excerpt, run.word_limit);
            ++run.truncated;
        }
    }
    if (run.truncated > 0)
        spdlog::info("{} {}: {} excerpt(s) cut to {} words", pair.pair_id, model_id, run.truncated, run.word_limit);
    run.excerpts = std::move(parsed.excerpts);
    return run;
}

namespace {

std::string numbered(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0) out += "\n";
        out += fmt::format("{}. {}", i + 1, items[i]);
    }
    return out;
}

}  // namespace

std::string judge_prompt(const std::vector<std::string>& candidates, const std::vector<std::string>& ground_truth) {
    return llm::prompt_template(TemplateId::judge)
        .render({{std::string(llm::slot::identified), numbered(candidates)},
                 {std::string(llm::slot::ground_truth), numbered(ground_truth)}});
}

void score_run(IdentificationRun& run, const pipeline::PaperErrorPair& pair, llm::Gateway& gateway,
               const std::string& judge_model_id, int max_retries, double threshold) {
    if (run.scored) throw ContractError(run.pair_id + ": run already scored");
    const auto gt = pair.ground_truth.texts();
    std::vector<textmatch::PreparedText> prepared_gt;
    for (const auto& g : gt) prepared_gt.push_back(textmatch::PreparedText::from(g));

    run.per_excerpt.assign(run.excerpts.size(), {});
    for (std::size_t i = 0; i < run.excerpts.size(); ++i) {
        const auto cand = textmatch::PreparedText::from(run.excerpts[i]);
        double best = 0.0;
        if (!cand.empty())
            for (const auto& g : prepared_gt)
                if (!g.empty()) best = std::max(best, textmatch::subspan_similarity(cand, g));
        run.per_excerpt[i].lev_score = best;
        run.per_excerpt[i].lev_match = best > threshold;
    }
    run.judge_model_id = judge_model_id;
    run.scored = true;
    if (run.excerpts.empty()) return;

    llm::LlmRequest req;
    req.model_id = judge_model_id;
    req.template_id = TemplateId::judge;
    req.prompt = judge_prompt(run.excerpts, gt);
    req.max_retries = max_retries;
    const auto reply = gateway.complete(req);
    if (reply.refusal) {
        spdlog::warn("{} {}: judge refused, lev-only scoring", run.pair_id, run.identification_model_id);
        run.judge_failed = true;
        return;
    }
    try {
        const auto verdicts = llm::parse_judge(reply.raw_text, run.excerpts.size());
        for (std::size_t i = 0; i < verdicts.size(); ++i) run.per_excerpt[i].judge_match = verdicts[i];
    } catch (const ParseError&) {
        spdlog::warn("{} {}: judge answer unparseable, lev-only scoring", run.pair_id, run.identification_model_id);
        run.judge_failed = true;
    }
}

}  // namespace forge::eval
