#include "forge/cli/app.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <ostream>
#include <set>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "forge/common/error.hpp"
#include "forge/common/fs.hpp"
#include "forge/corpus/ingest.hpp"
#include "forge/corpus/metadata.hpp"
#include "forge/eval/evaluate.hpp"
#include "forge/eval/labels.hpp"
#include "forge/llm/gateway.hpp"
#include "forge/llm/http_provider.hpp"
#include "forge/llm/mock.hpp"
#include "forge/pipeline/pipeline.hpp"
#include "forge/pipeline/store.hpp"
#include "forge/stats/report.hpp"

namespace fs = std::filesystem;

namespace forge::cli {

namespace {

// Flag values; unset ones leave the file/env configuration alone.
struct Flags {
    std::optional<std::string> config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> workers;
    std::optional<std::string> data_root;
    std::optional<std::string> mock_script;
    std::optional<double> identify_threshold;
    std::optional<double> replace_threshold;
    bool verbose = false;

    // ingest
    std::optional<std::string> from;
    std::optional<std::string> metadata;
    std::optional<std::string> arxiv_index;
    std::string venue, decision;
    // forge
    std::vector<std::string> insertion_models;
    std::optional<std::string> stop_after;
    std::optional<std::size_t> max_claims;
    // evaluate
    std::vector<std::string> identification_models;
    std::optional<std::string> judge_model;
    // stats / report
    std::optional<std::string> outcomes;
    std::optional<std::string> out_dir;
    std::optional<std::size_t> resamples;
    std::optional<std::string> labels;
    std::optional<std::string> runs;
};

RunConfig resolve(const Flags& f, const EnvLookup& env) {
    auto c = load_config(f.config ? std::optional<fs::path>(*f.config) : std::nullopt, env);
    if (f.seed) c.seed = *f.seed;
    if (f.workers) c.workers = *f.workers;
    if (f.data_root) c.data_root = *f.data_root;
    if (f.mock_script) c.mock_script = *f.mock_script;
    if (f.identify_threshold) c.identify_threshold = *f.identify_threshold;
    if (f.replace_threshold) c.replace_threshold = *f.replace_threshold;
    if (f.from) c.sources_dir = *f.from;
    if (!f.insertion_models.empty()) c.insertion_models = f.insertion_models;
    if (f.stop_after) c.stop_after = *f.stop_after;
    if (f.max_claims) c.max_claims = *f.max_claims;
    if (!f.identification_models.empty()) c.identification_models = f.identification_models;
    if (f.judge_model) c.judge_model = *f.judge_model;
    if (f.resamples) c.bootstrap_resamples = *f.resamples;
    c.validate();
    if (c.stop_after) {
        try {
            pipeline::stage_from_string(*c.stop_after);
        } catch (const LookupError& e) {
            throw ConfigError(e.what());
        }
    }
    return c;
}

nlohmann::json mock_script_json(const fs::path& path) {
    if (!fs::exists(path)) throw ConfigError("mock script not found: " + path.string());
    try {
        return nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(fmt::format("mock script {}: {}", path.string(), e.what()));
    }
}

// Routes the "mock" prefix to the scripted provider and every other prefix
// in `models` to its HTTP provider from the environment.
std::unique_ptr<llm::Gateway> make_gateway(const RunConfig& c, const std::vector<std::string>& models) {
    auto audit = std::make_shared<llm::AuditLog>(c.data_root / "logs" / "llm_audit.jsonl");
    auto g = std::make_unique<llm::Gateway>(llm::GatewayOptions{}, audit);
    if (c.mock_script)
        g->register_provider("mock", std::make_shared<llm::MockProvider>(mock_script_json(*c.mock_script)));
    std::set<std::string> prefixes;
    for (const auto& m : models) {
        const auto p = std::string(llm::provider_prefix(m));
        if (p.empty()) throw ConfigError("model id must look like <provider>:<model>: " + m);
        if (p == "mock" && !c.mock_script) throw ConfigError("model " + m + " needs mock_script (--mock-script)");
        if (p != "mock") prefixes.insert(p);
    }
    for (const auto& p : prefixes) g->register_provider(p, llm::provider_from_env(p));
    return g;
}

int cmd_ingest(const RunConfig& c, const Flags& f, std::ostream& out, std::ostream& err) {
    if (!c.sources_dir) throw ConfigError("ingest needs --from <dir> or sources_dir");
    const pipeline::RecordStore store(c.data_root);
    std::map<std::string, corpus::PaperSource> existing;
    for (auto& p : store.load_corpus()) existing.emplace(p.paper_id, std::move(p));

    const auto result = corpus::ingest_projects(*c.sources_dir);
    std::size_t written = 0, cached = 0;
    for (const auto& p : result.papers) {
        const auto it = existing.find(p.paper_id);
        if (it != existing.end() && it->second.latex == p.latex && it->second.title == p.title &&
            it->second.arxiv_id == p.arxiv_id) {
            spdlog::info("ingest: {} unchanged (cache hit)", p.paper_id);
            out << fmt::format("cached {}\n", p.paper_id);
            ++cached;
            continue;
        }
        store.save_paper(p);
        out << fmt::format("ingested {}\n", p.paper_id);
        ++written;
    }

    if (f.metadata) {
        corpus::SnapshotFileSource source(*f.metadata);
        const auto index = f.arxiv_index ? corpus::ArxivIndex::load(*f.arxiv_index) : corpus::ArxivIndex{};
        const auto fetched = corpus::fetch_accepted_papers({f.venue, f.decision}, source, index);
        std::vector<nlohmann::json> lines;
        for (const auto& s : fetched.stubs) {
            nlohmann::json j{{"paper_id", s.paper_id}, {"title", s.title}, {"matched", s.matched}, {"flags", s.flags}};
            if (s.arxiv_id) j["arxiv_id"] = *s.arxiv_id;
            if (s.source_url) j["source_url"] = *s.source_url;
            lines.push_back(std::move(j));
        }
        write_file_atomic(c.data_root / "metadata" / "stubs.jsonl", to_jsonl(lines));
        out << fmt::format("metadata: {} records, {} matched to arXiv, {} flagged\n", fetched.stubs.size(),
                           fetched.matched_count(), fetched.flagged_count());
    }

    const auto manifest = c.data_root / "ingest_failures.json";
    out << fmt::format("{} ingested, {} cached, {} failed\n", written, cached, result.failures.size());
    if (result.failures.empty()) {
        fs::remove(manifest);
        return kExitOk;
    }
    auto j = nlohmann::json::array();
    for (const auto& fail : result.failures) {
        j.push_back({{"project", fail.path}, {"error", fail.message}});
        err << fmt::format("ingest failed: {}: {}\n", fail.path, fail.message);
    }
    write_file_atomic(manifest, j.dump(2) + "\n");
    err << "failure manifest: " << manifest.string() << "\n";
    return kExitPartial;
}

int cmd_forge(const RunConfig& c, std::ostream& out) {
    if (c.insertion_models.empty()) throw ConfigError("forge needs insertion_models (--insertion-model)");
    auto gateway = make_gateway(c, c.insertion_models);
    for (const auto& model : c.insertion_models) {
        pipeline::PipelineConfig p;
        p.data_root = c.data_root;
        p.insertion_model = model;
        p.seed = c.seed;
        p.workers = c.effective_workers();
        p.max_claims_per_paper = c.max_claims;
        p.errors_per_claim = c.errors_per_claim;
        p.max_retries = c.max_retries;
        p.replace_threshold = c.replace_threshold;
        p.identify_threshold = c.identify_threshold;
        p.compile.engine = c.latex_engine;
        p.compile.timeout = std::chrono::seconds(c.latex_timeout);
        if (c.compile_cache) p.compile.cache_dir = c.data_root / "cache" / "latex";
        if (c.stop_after) p.stop_after = pipeline::stage_from_string(*c.stop_after);
        const auto result = pipeline::run_pipeline(p, *gateway);
        out << result.report.to_text() << "\n";
        out << fmt::format("{}: {} benchmark pairs -> {}\n", model, result.pairs.size(),
                           pipeline::RecordStore(c.data_root).manifest_path(model).string());
    }
    return kExitOk;
}

int cmd_evaluate(const RunConfig& c, std::ostream& out, std::ostream& err) {
    if (c.identification_models.empty())
        throw ConfigError("evaluate needs identification_models (--identification-model)");
    std::vector<std::string> models = c.identification_models;
    if (c.judge_model) models.push_back(*c.judge_model);
    for (const auto& p : pipeline::load_benchmark(c.data_root)) models.push_back(p.insertion_model_id);
    auto gateway = make_gateway(c, models);

    eval::EvaluationConfig e;
    e.data_root = c.data_root;
    e.identification_models = c.identification_models;
    e.judge_model = c.judge_model;
    e.workers = c.effective_workers();
    e.max_retries = c.max_retries;
    e.identify_threshold = c.identify_threshold;
    const auto result = eval::evaluate_benchmark(e, *gateway);
    out << fmt::format("{} runs, {} failed -> {}\n", result.runs.size(), result.failures.size(),
                       (eval::results_dir(c.data_root) / "outcomes.csv").string());
    out << eval::accuracy_table_csv(eval::accuracy_table(result.outcomes));
    for (const auto& f : result.failures) err << "run failed: " << f << "\n";
    return result.failures.empty() ? kExitOk : kExitPartial;
}

fs::path report_dir(const RunConfig& c, const Flags& f) {
    return f.out_dir ? fs::path(*f.out_dir) : eval::results_dir(c.data_root) / "report";
}

int cmd_stats(const RunConfig& c, const Flags& f, std::ostream& out, std::ostream& err) {
    const fs::path outcomes = f.outcomes ? fs::path(*f.outcomes) : eval::results_dir(c.data_root) / "outcomes.csv";
    if (!fs::exists(outcomes)) {
        err << "outcome file not found: " << outcomes.string() << " (run `evaluate` first or pass --outcomes)\n";
        return kExitPartial;
    }
    const auto rows = eval::read_outcomes_csv(outcomes);
    if (rows.empty()) {
        err << "outcome file has no rows: " << outcomes.string() << "\n";
        return kExitPartial;
    }
    stats::StatsOptions o;
    o.resamples = c.bootstrap ? c.bootstrap_resamples : 0;
    o.seed = c.seed;
    o.workers = c.effective_workers();
    const auto result = stats::compute_stats(rows, o);

    std::optional<stats::AgreementReport> agreement;
    if (f.labels) {
        const fs::path runs_path = f.runs ? fs::path(*f.runs) : eval::results_dir(c.data_root) / "runs.jsonl";
        if (!fs::exists(runs_path)) {
            err << "run file not found: " << runs_path.string() << "\n";
            return kExitPartial;
        }
        stats::AlphaOptions a;
        a.resamples = c.bootstrap ? c.bootstrap_resamples : 0;
        a.seed = c.seed;
        a.workers = c.effective_workers();
        agreement = stats::summarize_agreement(eval::read_runs_jsonl(runs_path), eval::read_labels_csv(*f.labels), a);
    }

    const auto dir = report_dir(c, f);
    stats::write_report_bundle(dir, result, agreement);
    out << stats::summary_text(result);
    if (agreement) out << "\n" << agreement->to_text();
    out << "report bundle: " << dir.string() << "\n";
    for (const auto& e : result.fit_errors) err << "fit failed: " << e << "\n";
    if (!result.bootstrap_error.empty()) err << "bootstrap unusable: " << result.bootstrap_error << "\n";
    return result.complete() ? kExitOk : kExitPartial;
}

// Collects the stage reports and the stats bundle into one markdown file.
int cmd_report(const RunConfig& c, const Flags& f, std::ostream& out, std::ostream& err) {
    const auto dir = report_dir(c, f);
    if (!fs::exists(dir / "summary.txt")) {
        err << "no stats bundle in " << dir.string() << " (run `stats` first)\n";
        return kExitPartial;
    }
    std::string md = "# Benchmark report\n\n## Pipeline stages\n\n";
    std::vector<fs::path> tracks;
    if (fs::is_directory(c.data_root / "tracks"))
        for (const auto& e : fs::directory_iterator(c.data_root / "tracks"))
            if (fs::exists(e.path() / "stage_report.txt")) tracks.push_back(e.path());
    std::sort(tracks.begin(), tracks.end());
    if (tracks.empty()) md += "No pipeline runs found.\n\n";
    for (const auto& t : tracks) md += "```\n" + read_file(t / "stage_report.txt") + "```\n\n";

    const auto section = [&](const std::string& title, const std::string& file) {
        if (!fs::exists(dir / file)) return;
        md += "## " + title + "\n\n```\n" + read_file(dir / file) + "```\n\n";
    };
    section("Accuracy at k", "table4.csv");
    section("Coefficients", "table5.csv");
    section("Aggregate scores", "table6.csv");
    section("Candidate counts", "table7.csv");
    section("Agreement", "agreement.txt");
    section("Fit summary", "summary.txt");
    if (fs::exists(dir / "fig3.svg")) md += "## Predicted accuracy\n\n![predicted accuracy](fig3.svg)\n";
    write_file_atomic(dir / "report.md", md);
    out << "report: " << (dir / "report.md").string() << "\n";
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const EnvLookup& env) {
    CLI::App app{"Builds an error-identification benchmark from LaTeX papers and scores models on it.", "forge"};
    app.require_subcommand(1);
    Flags f;
    app.add_option("--config", f.config, "Config file (key = value)");
    app.add_option("--seed", f.seed, "Seed for every stochastic step");
    app.add_option("--workers", f.workers, "Worker threads (default: logical cores)");
    app.add_option("--data-root", f.data_root, "Directory holding all state");
    app.add_flag("-v,--verbose", f.verbose, "Log progress to stderr");

    auto* ingest = app.add_subcommand("ingest", "Flatten LaTeX projects into the corpus");
    ingest->add_option("--from", f.from, "Directory with one subdirectory per paper");
    ingest->add_option("--metadata", f.metadata, "Venue metadata snapshot (JSON lines)");
    ingest->add_option("--arxiv-index", f.arxiv_index, "arXiv title index (JSON lines)");
    ingest->add_option("--venue", f.venue, "Keep metadata records of this venue");
    ingest->add_option("--decision", f.decision, "Keep metadata records with this decision");

    auto* forge_cmd = app.add_subcommand("forge", "Insert, filter and compile errors; sample the benchmark");
    forge_cmd->add_option("--insertion-model", f.insertion_models, "Insertion model id (repeatable)");
    forge_cmd->add_option("--stop-after", f.stop_after, "Stop after this stage; a later run resumes");
    forge_cmd->add_option("--max-claims", f.max_claims, "Claims per paper (0 = all)");

    auto* evaluate = app.add_subcommand("evaluate", "Run identification models on the benchmark");
    evaluate->add_option("--identification-model", f.identification_models, "Identification model id (repeatable)");
    evaluate->add_option("--judge-model", f.judge_model, "Judge model (default: the pair's insertion model)");

    auto* stats_cmd = app.add_subcommand("stats", "Fit the logistic model and write the report bundle");
    stats_cmd->add_option("--outcomes", f.outcomes, "Outcome CSV (default: <data-root>/results/outcomes.csv)");
    stats_cmd->add_option("--out", f.out_dir, "Bundle directory (default: <data-root>/results/report)");
    stats_cmd->add_option("--resamples", f.resamples, "Bootstrap resamples");
    stats_cmd->add_option("--labels", f.labels, "Human label CSV for the agreement report");
    stats_cmd->add_option("--runs", f.runs, "Identification runs (default: <data-root>/results/runs.jsonl)");

    auto* report = app.add_subcommand("report", "Collect stage reports and the stats bundle into report.md");
    report->add_option("--out", f.out_dir, "Bundle directory (default: <data-root>/results/report)");

    for (auto* sub : {forge_cmd, evaluate}) {
        sub->add_option("--mock-script", f.mock_script, "Scripted responses for mock:* models");
        sub->add_option("--identify-threshold", f.identify_threshold, "Sub-span similarity for a match");
        sub->add_option("--replace-threshold", f.replace_threshold, "Similarity needed to replace an excerpt");
    }
    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    spdlog::set_level(f.verbose ? spdlog::level::info : spdlog::level::warn);
    try {
        const auto c = resolve(f, env);
        if (ingest->parsed()) return cmd_ingest(c, f, out, err);
        if (forge_cmd->parsed()) return cmd_forge(c, out);
        if (evaluate->parsed()) return cmd_evaluate(c, out, err);
        if (stats_cmd->parsed()) return cmd_stats(c, f, out, err);
        return cmd_report(c, f, out, err);
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const EnvironmentError& e) {
        err << "environment error: " << e.what() << "\n";
        return kExitEnvironment;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitPartial;
    }
}

}  // namespace forge::cli
