#include "forge/pipeline/pipeline.hpp"

#include <algorithm>
#include <random>
#include <set>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "forge/common/error.hpp"
#include "forge/common/fs.hpp"
#include "forge/common/hash.hpp"
#include "forge/common/parallel.hpp"
#include "forge/pipeline/stages.hpp"

namespace forge::pipeline {

namespace {

// Runs fn; a recoverable forge error is handed to on_error. Configuration,
// environment and contract errors are not per-record problems and escape.
template <typename Fn, typename OnError>
void isolate(Fn&& fn, OnError&& on_error) {
    try {
        fn();
    } catch (const ConfigError&) {
        throw;
    } catch (const EnvironmentError&) {
        throw;
    } catch (const ContractError&) {
        throw;
    } catch (const Error& e) {
        on_error(e);
    }
}

bool alive_after(const ErrorRecord& r, Stage s) {
    const auto removed = r.removed_at();
    return !removed || *removed > s;
}

std::string stage_title(Stage s) {
    switch (s) {
        case Stage::claim_extraction: return "Claim extraction";
        case Stage::error_generation: return "Error generation";
        case Stage::invalid_filter: return "Filtering invalid errors";
        case Stage::easy_filter: return "Filtering easy errors (prompt)";
        case Stage::insertion: return "Error insertion";
        case Stage::localization: return "Error localization";
        case Stage::internal_identification: return "Internal identification";
        case Stage::compilation: return "PDF compilation";
    }
    return "?";
}

}  // namespace

std::string percent(std::size_t part, std::size_t base) {
    if (base == 0) return "-";
    return fmt::format("{:.1f}", 100.0 * static_cast<double>(part) / static_cast<double>(base));
}

std::size_t StageReport::generated() const {
    for (const auto& r : rows)
        if (r.stage == Stage::error_generation) return r.errors.value_or(0);
    return 0;
}

std::string StageReport::to_csv() const {
    std::string out = "stage,papers,papers_pct,errors,errors_pct,removed\n";
    const auto gen = generated();
    for (const auto& r : rows) {
        out += fmt::format("{},{},{},{},{},{}\n", to_string(r.stage), r.papers, percent(r.papers, papers_in),
                           r.errors ? std::to_string(*r.errors) : "-", r.errors ? percent(*r.errors, gen) : "-",
                           r.removed);
    }
    out += fmt::format("benchmark,{},{},{},{},-\n", benchmark_papers, percent(benchmark_papers, papers_in),
                       benchmark_pairs, percent(benchmark_pairs, gen));
    return out;
}

std::string StageReport::to_text() const {
    std::string out = fmt::format("Insertion model: {}\n", insertion_model_id);
    out += fmt::format("Papers: {}  Claims: {} ({} duplicate)  Claim extraction failures: {}\n", papers_in, claims,
                       duplicate_claims, claim_failures);
    if (!dropped.empty()) {
        out += "Dropped generations:";
        for (const auto& [reason, n] : dropped) out += fmt::format(" {}={}", reason, n);
        out += "\n";
    }
    out += "\n";
    const auto gen = generated();
    out += fmt::format("{:<32}{:>16}{:>16}{:>10}\n", "Stage", "# Papers", "# Errors", "Removed");
    auto cell = [](std::size_t n, const std::string& pct) { return pct == "-" ? std::to_string(n) : fmt::format("{} ({}%)", n, pct); };
    for (const auto& r : rows) {
        out += fmt::format("{:<32}{:>16}{:>16}{:>10}\n", stage_title(r.stage), cell(r.papers, percent(r.papers, papers_in)),
                           r.errors ? cell(*r.errors, percent(*r.errors, gen)) : "-",
                           r.stage <= Stage::error_generation ? "-" : std::to_string(r.removed));
    }
    out += fmt::format("{:<32}{:>16}{:>16}{:>10}\n", "Sampled benchmark", cell(benchmark_papers, percent(benchmark_papers, papers_in)),
                       cell(benchmark_pairs, percent(benchmark_pairs, gen)), "-");
    out += "\nStatus counts:";
    for (const auto& [status, n] : status_counts) out += fmt::format(" {}={}", status, n);
    out += "\n";
    return out;
}

nlohmann::json StageReport::to_json() const {
    json rows_j = json::array();
    for (const auto& r : rows) {
        json row = {{"stage", to_string(r.stage)}, {"papers", r.papers}, {"removed", r.removed}};
        row["errors"] = r.errors ? json(*r.errors) : json(nullptr);
        rows_j.push_back(row);
    }
    return {{"insertion_model_id", insertion_model_id},
            {"papers_in", papers_in},
            {"claims", claims},
            {"duplicate_claims", duplicate_claims},
            {"claim_failures", claim_failures},
            {"dropped", dropped},
            {"status_counts", status_counts},
            {"rows", rows_j},
            {"benchmark_papers", benchmark_papers},
            {"benchmark_pairs", benchmark_pairs}};
}

StageReport make_stage_report(const std::string& model_id, std::size_t papers_in, const std::vector<json>& claim_files,
                              const std::vector<ErrorRecord>& records,
                              const std::map<std::string, std::size_t>& dropped,
                              const std::vector<PaperErrorPair>& pairs) {
    StageReport rep;
    rep.insertion_model_id = model_id;
    rep.papers_in = papers_in;
    rep.dropped = dropped;

    StageRow claims_row{Stage::claim_extraction, 0, std::nullopt, 0};
    for (const auto& f : claim_files) {
        if (f.is_null()) continue;
        const auto& cs = f.at("claims");
        if (f.contains("error")) ++rep.claim_failures;
        if (!cs.empty()) ++claims_row.papers;
        rep.claims += cs.size();
        for (const auto& c : cs)
            if (c.contains("duplicate_of")) ++rep.duplicate_claims;
    }
    rep.rows.push_back(claims_row);

    std::set<std::string> gen_papers;
    for (const auto& r : records) gen_papers.insert(r.paper_id);
    rep.rows.push_back({Stage::error_generation, gen_papers.size(), records.size(), 0});

    for (auto s : {Stage::invalid_filter, Stage::easy_filter, Stage::insertion, Stage::localization,
                   Stage::internal_identification, Stage::compilation}) {
        StageRow row{s, 0, std::nullopt, 0};
        std::set<std::string> papers;
        std::size_t errors = 0;
        for (const auto& r : records) {
            if (alive_after(r, s)) {
                ++errors;
                papers.insert(r.paper_id);
            } else if (r.removed_at() == s) {
                ++row.removed;
            }
        }
        row.papers = papers.size();
        row.errors = errors;
        rep.rows.push_back(row);
    }
    for (const auto& r : records) ++rep.status_counts[std::string(to_string(r.status))];

    std::set<std::string> bench_papers;
    for (const auto& p : pairs) bench_papers.insert(p.paper_id);
    rep.benchmark_papers = bench_papers.size();
    rep.benchmark_pairs = pairs.size();
    return rep;
}

void compile_survivors(std::vector<ErrorRecord>& records, const RecordStore& store,
                       const corpus::CompileOptions& options, std::size_t workers) {
    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < records.size(); ++i)
        if (records[i].status == ErrorStatus::survived) todo.push_back(i);
    parallel_for(todo.size(), workers, [&](std::size_t t) {
        auto& r = records[todo[t]];
        const auto latex = store.load_modified(r.paper_id, r.error_id);
        const auto workdir = store.root() / "work" / r.error_id;
        const auto result = corpus::compile_pdf(latex, workdir, options, r.paper_id);
        if (result.ok()) {
            r.pdf_path = RecordStore::pdf_rel(r.paper_id, r.error_id);
            write_file_atomic(store.root() / r.pdf_path, read_file(*result.pdf_path));
            r.status = ErrorStatus::compiled;
            r.compile_log.clear();
        } else {
            r.status = ErrorStatus::compile_failed;
            r.compile_log = result.timed_out ? "timeout" : result.log_excerpt;
        }
        std::error_code ec;
        fs::remove_all(workdir, ec);
        store.save_record(r);
    });
}

std::vector<PaperErrorPair> sample_benchmark(const std::vector<ErrorRecord>& records, const RecordStore& store,
                                             std::uint64_t seed) {
    std::map<std::pair<std::string, std::string>, std::vector<const ErrorRecord*>> groups;
    for (const auto& r : records)
        if (r.status == ErrorStatus::compiled) groups[{r.paper_id, r.insertion_model_id}].push_back(&r);

    std::vector<PaperErrorPair> pairs;
    for (auto& [key, candidates] : groups) {
        std::sort(candidates.begin(), candidates.end(),
                  [](const ErrorRecord* a, const ErrorRecord* b) { return a->error_id < b->error_id; });
        const auto hp = fnv1a64(key.first);
        const auto hm = fnv1a64(key.second);
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(hp), static_cast<std::uint32_t>(hp >> 32),
                          static_cast<std::uint32_t>(hm), static_cast<std::uint32_t>(hm >> 32)};
        std::mt19937_64 rng(seq);
        std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
        const auto& r = *candidates[pick(rng)];

        PaperErrorPair p;
        p.pair_id = make_pair_id(r.error_id);
        p.paper_id = r.paper_id;
        p.error_id = r.error_id;
        p.insertion_model_id = r.insertion_model_id;
        p.claim = r.claim;
        p.category = r.category.value_or("");
        p.explanation = r.generated.explanation;
        p.modified_latex_path = RecordStore::modified_rel(r.paper_id, r.error_id);
        p.modified_latex_sha256 = sha256_hex(store.load_modified(r.paper_id, r.error_id));
        p.pdf_path = r.pdf_path;
        p.ground_truth = r.ground_truth;
        pairs.push_back(std::move(p));
    }
    std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) { return a.pair_id < b.pair_id; });
    return pairs;
}

std::vector<PaperErrorPair> build_benchmark(std::vector<ErrorRecord>& records, const RecordStore& store,
                                            std::uint64_t seed, const corpus::CompileOptions& options,
                                            std::size_t workers) {
    for (const auto& r : records)
        if (!is_terminal(r.status) && r.status != ErrorStatus::survived)
            throw ContractError(r.error_id + " has not finished the filtration stages");
    compile_survivors(records, store, options, workers);
    return sample_benchmark(records, store, seed);
}

PipelineResult run_pipeline(const PipelineConfig& cfg, llm::Gateway& gateway) {
    if (cfg.insertion_model.empty()) throw ConfigError("no insertion model configured");
    if (!gateway.knows(cfg.insertion_model)) throw ConfigError("no provider for " + cfg.insertion_model);
    if (cfg.errors_per_claim < 1) throw ConfigError("errors_per_claim must be at least 1");
    for (double t : {cfg.replace_threshold, cfg.identify_threshold})
        if (!(t > 0.0 && t < 1.0)) throw ConfigError(fmt::format("threshold {} outside (0, 1)", t));

    const RecordStore store(cfg.data_root);
    const auto& model = cfg.insertion_model;
    const auto papers = store.load_corpus(cfg.papers_dir);
    std::map<std::string, std::size_t> paper_index;
    for (std::size_t i = 0; i < papers.size(); ++i) paper_index[papers[i].paper_id] = i;

    const StageContext ctx{gateway, model, cfg.max_retries, cfg.replace_threshold, cfg.identify_threshold};
    const auto reached = [&](Stage s) { return !cfg.stop_after || s <= *cfg.stop_after; };
    PipelineResult result;

    // Claim extraction, one task per paper.
    std::vector<json> claim_files(papers.size());
    parallel_for(papers.size(), cfg.workers, [&](std::size_t i) {
        const auto& paper = papers[i];
        if (auto saved = store.load_claims(model, paper.paper_id)) {
            claim_files[i] = std::move(*saved);
            return;
        }
        json j = {{"paper_id", paper.paper_id}, {"model_id", model}, {"claims", json::array()}};
        bool persist = true;
        isolate(
            [&] {
                auto ex = extract_claims(paper, ctx, cfg.max_claims_per_paper);
                j["claims"] = ex.claims;
                if (ex.error) {
                    j["error"] = *ex.error;
                    spdlog::warn("{}: claim extraction failed: {}", paper.paper_id, *ex.error);
                }
            },
            [&](const Error& e) {
                j["error"] = fmt::format("gateway: {}", e.what());
                persist = false;  // retried on the next run
                spdlog::error("{}: claim extraction: {}", paper.paper_id, e.what());
            });
        if (persist) store.save_claims(model, paper.paper_id, j);
        claim_files[i] = std::move(j);
    });

    // Error generation, one task per claim; the n errors of a claim are
    // drawn in order so scripted providers stay deterministic.
    std::vector<Claim> claims;
    for (const auto& f : claim_files)
        for (const auto& c : f.at("claims")) claims.push_back(c.get<Claim>());
    std::vector<std::vector<ErrorRecord>> generated(claims.size());
    std::vector<std::vector<std::string>> drops(claims.size());
    if (reached(Stage::error_generation)) {
        parallel_for(claims.size(), cfg.workers, [&](std::size_t i) {
            const auto& claim = claims[i];
            const auto& paper = papers[paper_index.at(claim.paper_id)];
            for (int n = 1; n <= cfg.errors_per_claim; ++n) {
                const auto id = make_error_id(claim.paper_id, claim.claim_index, model, n);
                if (auto rec = store.load_record(model, id)) {
                    generated[i].push_back(std::move(*rec));
                    continue;
                }
                if (auto reason = store.load_dropped(model, id)) {
                    drops[i].push_back(*reason);
                    continue;
                }
                isolate(
                    [&] {
                        auto out = generate_error(paper, claim, ctx, id);
                        if (out.record) {
                            store.save_record(*out.record);
                            generated[i].push_back(std::move(*out.record));
                        } else {
                            spdlog::info("{}: generation dropped ({})", id, out.drop_reason);
                            store.save_dropped(model, id, out.drop_reason);
                            drops[i].push_back(out.drop_reason);
                        }
                    },
                    [&](const Error& e) {
                        spdlog::error("{}: generation: {}", id, e.what());
                        drops[i].push_back("gateway_error");
                    });
            }
        });
    }
    std::map<std::string, std::size_t> dropped;
    for (const auto& d : drops)
        for (const auto& reason : d) ++dropped[reason.substr(0, reason.find(':'))];
    auto& records = result.records;
    for (auto& g : generated)
        for (auto& r : g) records.push_back(std::move(r));

    // Filtration, insertion, localization and internal identification; each
    // record walks its stages in order and is saved after every one.
    parallel_for(records.size(), cfg.workers, [&](std::size_t i) {
        auto& r = records[i];
        const auto& paper = papers[paper_index.at(r.paper_id)];
        const auto guarded = [&](Stage s, auto&& fn) {
            isolate(fn, [&](const Error& e) {
                spdlog::error("{}: {}: {}; excluded", r.error_id, to_string(s), e.what());
                r.status = ErrorStatus::excluded;
                r.excluded_at = s;
                r.notes.push_back(fmt::format("{}: {}", to_string(s), e.what()));
            });
            store.save_record(r);
        };
        if (r.status == ErrorStatus::generated && !r.invalid_filter_passed) {
            if (!reached(Stage::invalid_filter)) return;
            guarded(Stage::invalid_filter, [&] { filter_invalid(r, paper, ctx); });
        }
        if (r.status == ErrorStatus::generated && r.invalid_filter_passed == true && !r.easy_filter_passed) {
            if (!reached(Stage::easy_filter)) return;
            guarded(Stage::easy_filter, [&] { filter_easy_prompt(r, paper, ctx); });
        }
        std::optional<std::string> modified;
        if (r.status == ErrorStatus::generated && r.easy_filter_passed == true) {
            if (!reached(Stage::insertion)) return;
            modified = apply_insertion(r, paper, cfg.replace_threshold);
            if (modified) store.save_modified(r.paper_id, r.error_id, *modified);
            store.save_record(r);
            if (!modified || !reached(Stage::localization)) return;
            guarded(Stage::localization, [&] { localize_error(r, paper, *modified, ctx); });
        }
        if (r.status == ErrorStatus::localized) {
            if (!reached(Stage::internal_identification)) return;
            if (!modified) modified = store.load_modified(r.paper_id, r.error_id);
            guarded(Stage::internal_identification, [&] { internal_identify(r, *modified, ctx); });
        }
    });

    result.complete = reached(Stage::compilation);
    if (result.complete) {
        auto options = cfg.compile;
        if (!options.cache_dir) options.cache_dir = cfg.data_root / "cache" / "latex";
        result.pairs = build_benchmark(records, store, cfg.seed, options, cfg.workers);
        write_manifest(store.manifest_path(model), result.pairs);
    }

    result.report = make_stage_report(model, papers.size(), claim_files, records, dropped, result.pairs);
    const auto dir = store.track_dir(model);
    write_file_atomic(dir / "stage_report.csv", result.report.to_csv());
    write_file_atomic(dir / "stage_report.txt", result.report.to_text());
    write_file_atomic(dir / "stage_report.json", result.report.to_json().dump(2) + "\n");
    spdlog::info("{}: {} generated, {} compiled, {} benchmark pairs", model, records.size(),
                 result.report.status_counts["compiled"], result.pairs.size());
    return result;
}

}  // namespace forge::pipeline
