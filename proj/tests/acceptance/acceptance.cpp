// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failing criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "forge/cli/app.hpp"
#include "forge/common/csv.hpp"
#include "forge/common/fs.hpp"
#include "forge/eval/evaluate.hpp"
#include "forge/eval/labels.hpp"
#include "forge/eval/outcomes.hpp"
#include "forge/pipeline/pipeline.hpp"
#include "forge/pipeline/stages.hpp"
#include "forge/stats/agreement.hpp"
#include "forge/stats/bootstrap.hpp"
#include "forge/stats/logistic.hpp"
#include "forge/textmatch/levenshtein.hpp"
#include "forge/textmatch/locate.hpp"
#include "forge/textmatch/ratio.hpp"
#include "forge/textmatch/sentences.hpp"
#include "forge/textmatch/subspan.hpp"
#include "forge/textmatch/words.hpp"
#include "support/oracles.hpp"
#include "support/paper_tables.hpp"
#include "support/synthetic.hpp"
#include "support/tempdir.hpp"
#include "support/toy.hpp"

using namespace forge;
namespace fs = std::filesystem;
using Words = std::vector<std::string>;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;

    // Records the first failure only.
    void check(bool ok, const std::string& what) {
        if (!ok && pass) {
            pass = false;
            detail = what;
        }
    }
};

Words random_words(std::mt19937& rng, std::size_t max_len) {
    std::uniform_int_distribution<std::size_t> len(0, max_len);
    std::uniform_int_distribution<int> letter('a', 'e');
    Words w(len(rng));
    for (auto& s : w) s = std::string(1, static_cast<char>(letter(rng)));
    return w;
}

std::string random_text(std::mt19937& rng, std::size_t n) {
    static const char* vocab[] = {"alpha", "beta", "gamma", "delta", "model", "proof", "holds"};
    std::uniform_int_distribution<int> pick(0, 6), len(1, 5);
    std::string out;
    for (std::size_t s = 0; s < n; ++s) {
        std::string sentence;
        for (int w = 0, words = len(rng); w < words; ++w) {
            std::string word = vocab[pick(rng)];
            if (w == 0) word[0] = static_cast<char>(std::toupper(word[0]));
            sentence += (w ? " " : "") + word;
        }
        out += (s ? " " : "") + sentence + ".";
    }
    return out;
}

std::vector<Words> sentence_words(const std::string& text) {
    std::vector<Words> out;
    for (const auto& s : textmatch::split_sentences(text)) out.push_back(textmatch::tokenize_words(s).words);
    return out;
}

Verdict levenshtein_oracle() {
    Verdict v;
    std::mt19937 rng(1);
    for (int i = 0; i < 1000 && v.pass; ++i) {
        const auto a = random_words(rng, 8), b = random_words(rng, 8);
        v.check(textmatch::levenshtein_words(a, b) == oracle::levenshtein_naive(a, b), fmt::format("pair {}", i));
    }
    if (v.pass) v.detail = "1000 pairs exact";
    return v;
}

Verdict subspan_oracle() {
    Verdict v;
    std::mt19937 rng(2);
    std::uniform_int_distribution<std::size_t> n(1, 6);
    for (int i = 0; i < 300 && v.pass; ++i) {
        const auto x = random_text(rng, n(rng)), y = random_text(rng, n(rng));
        v.check(textmatch::subspan_similarity(x, y) == oracle::subspan_exhaustive(sentence_words(x), sentence_words(y)),
                x + " | " + y);
    }
    if (v.pass) v.detail = "300 pairs exact";
    return v;
}

Verdict ratio_oracle() {
    Verdict v;
    std::mt19937 rng(3);
    std::uniform_int_distribution<int> len(0, 40), letter('a', 'd');
    for (int i = 0; i < 500 && v.pass; ++i) {
        std::string a(static_cast<std::size_t>(len(rng)), 'a'), b(static_cast<std::size_t>(len(rng)), 'a');
        for (auto& c : a) c = static_cast<char>(letter(rng));
        for (auto& c : b) c = static_cast<char>(letter(rng));
        v.check(textmatch::ratio_similarity(a, b) == oracle::ratio_bruteforce(a, b), a + " | " + b);
    }
    if (v.pass) v.detail = "500 pairs exact";
    return v;
}

Verdict properties() {
    Verdict v;
    constexpr int kCases = 500;
    std::mt19937 rng(4);

    for (int i = 0; i < kCases; ++i) {
        auto a = random_words(rng, 9), b = random_words(rng, 9);
        if (a.empty()) a.push_back("a");
        const double s = textmatch::s_edit(a, b);
        v.check(s == textmatch::s_edit(b, a) && s >= 0.0 && s <= 1.0 && textmatch::s_edit(a, a) == 1.0, "s_edit");
    }

    // Adding candidates never lowers the best score; the score is never
    // below plain s_edit of the whole texts.
    for (int i = 0; i < kCases; ++i) {
        const std::vector<std::string> gt{random_text(rng, 3)};
        std::vector<std::string> cands;
        double prev = 0.0;
        for (int k = 0; k < 3; ++k) {
            cands.push_back(random_text(rng, 1 + rng() % 4));
            const auto r = textmatch::is_identified(gt, cands);
            v.check(r.score >= prev, "subspan monotonicity");
            prev = r.score;
            v.check(textmatch::subspan_similarity(gt[0], cands.back()) + 1e-12 >=
                        textmatch::s_edit(textmatch::tokenize_words(gt[0]), textmatch::tokenize_words(cands.back())),
                    "whole-text lower bound");
        }
    }

    for (int i = 0; i < kCases; ++i) {
        eval::IdentificationRun run;
        run.pair_id = fmt::format("p{}", i);
        run.identification_model_id = "m";
        run.insertion_model_id = "ins";
        run.scored = true;
        for (std::size_t e = 0, n = rng() % 11; e < n; ++e) {
            run.excerpts.push_back("e");
            run.per_excerpt.push_back({0.0, rng() % 6 == 0, rng() % 8 == 0});
        }
        const auto row = eval::outcome_of(run);
        for (int k = 2; k <= eval::kMaxK; ++k) v.check(row.at(k - 1) <= row.at(k), "identified@k monotonicity");
    }

    for (int i = 0; i < kCases; ++i) {
        std::string src = random_text(rng, 8);
        for (auto& c : src)
            if (c == '.' && rng() % 2) c = '\n';
        std::uniform_int_distribution<std::size_t> pos(0, src.size() - 1);
        std::size_t a = pos(rng), b = pos(rng);
        if (a > b) std::swap(a, b);
        const auto needle = src.substr(a, b - a + 1);
        const auto span = textmatch::fuzzy_locate(src, needle);
        v.check(span.exact && src.substr(span.char_start, span.char_end - span.char_start) == needle, "fuzzy_locate exact needle");
    }

    const std::vector<std::string> words{"alpha", "beta", "gamma", "$x$", "\\emph{y}", "{z}", "-", "%", "epsilon"};
    for (int i = 0; i < kCases; ++i) {
        std::vector<std::string> sentences;
        for (int s = 0, n = 4 + static_cast<int>(rng() % 6); s < n; ++s) {
            std::string sentence = fmt::format("S{}:", s);
            for (int w = 0, len = 3 + static_cast<int>(rng() % 8); w < len; ++w) sentence += " " + words[rng() % words.size()];
            sentences.push_back(sentence + ".");
        }
        std::string source;
        for (const auto& s : sentences) source += s + (rng() % 3 == 0 ? "\n\n" : "\n");
        std::set<std::size_t> chosen;
        for (std::size_t picks = 1 + rng() % 3; chosen.size() < picks;) chosen.insert(rng() % sentences.size());
        llm::GeneratedError e;
        for (auto idx : chosen) e.pairs.push_back({sentences[idx], fmt::format("Replaced {} {}.", idx, rng() % 100)});
        e.explanation = "x";
        const auto result = pipeline::insert_error(source, e);
        v.check(result.ok && pipeline::revert_insertion(result.latex, result, e) == source, "insertion round trip");
    }
    if (v.pass) v.detail = fmt::format("5 properties x {} cases", kCases);
    return v;
}

Verdict published_coefficients() {
    namespace paper = testsupport::paper;
    Verdict v;
    double worst = 0.0;
    int cells = 0;
    for (int k : {3, 10}) {
        const auto& c = paper::coefficients().at(k);
        stats::LogisticFit fit;
        fit.k = k;
        fit.converged = true;
        for (const auto& [m, b] : c.beta) fit.beta[m] = {b, 0.0};
        fit.gamma[paper::kGemini] = {0.0, 0.0};
        fit.gamma[paper::kGpt] = {c.gamma_gpt, 0.0};
        for (const auto& [ins, by_id] : paper::accuracy())
            for (const auto& [id, acc] : by_id) {
                if (ins == id) continue;
                ++cells;
                const double d = std::abs(stats::predict_accuracy(fit, ins, id).p - acc.at(k));
                worst = std::max(worst, d);
                v.check(d <= 0.02, fmt::format("{} on {} at k={}: off by {:.3f}", id, ins, k, d));
            }
    }
    v.check(cells == 16, "expected 16 cells");
    if (v.pass) v.detail = fmt::format("{} cells, max |delta| {:.4f}", cells, worst);
    return v;
}

Verdict synthetic_recovery() {
    Verdict v;
    const auto m = testsupport::paper_shaped_model();
    const auto fits = stats::fit_all(testsupport::synthetic_rows(m, 20000, 6));
    double worst = 0.0;
    for (const auto& f : fits) {
        for (const auto& id : m.identification) worst = std::max(worst, std::abs(f.beta.at(id).value - m.true_beta(id, f.k)));
        worst = std::max(worst, std::abs(f.gamma.at("m:b").value - m.gamma.at("m:b")));
    }
    v.check(worst <= 0.05, fmt::format("max coefficient error {:.4f}", worst));

    // Coverage pooled over trials and identification models.
    int covered = 0, total = 0;
    for (std::uint64_t t = 0; t < 100; ++t) {
        stats::BootstrapOptions o;
        o.resamples = 1000;
        o.seed = 600 + t;
        const auto res = stats::bootstrap_beta(testsupport::synthetic_rows(m, 1000, 6000 + t), o);
        for (const auto& s : res.scores) {
            const double truth = m.beta.at(s.identification_model);
            covered += s.ci_low <= truth && truth <= s.ci_high;
            ++total;
        }
    }
    const double rate = static_cast<double>(covered) / total;
    v.check(rate >= 0.93, fmt::format("coverage {}/{}", covered, total));
    v.detail = fmt::format("max coefficient error {:.4f}, coverage {}/{} ({:.1f}%)", worst, covered, total, 100 * rate);
    return v;
}

Verdict alpha() {
    using stats::Unit;
    Verdict v;
    const std::vector<Unit> perfect{{1, 1}, {2, 2}, {0, 0, 0}, {3, std::nullopt, 3}};
    v.check(stats::krippendorff_alpha_point(perfect) == 1.0, "perfect agreement");

    const std::vector<Unit> hand{{1, 1}, {2, 2}, {3, 3}, {3, 3}, {2, 2}, {1, 3}, {4, 4}, {1, 1}, {2, 2}, {5, 5}};
    v.check(std::abs(stats::krippendorff_alpha_point(hand) - 134.0 / 153.0) <= 1e-12, "coincidence oracle");

    std::mt19937 rng(7);
    std::vector<Unit> units;
    for (int i = 0; i < 200; ++i) {
        const long truth = static_cast<long>(rng() % 4);
        Unit u;
        for (int c = 0; c < 3; ++c) u.push_back(rng() % 5 == 0 ? static_cast<long>(rng() % 4) : truth);
        if (rng() % 7 == 0) u[rng() % 3] = std::nullopt;
        units.push_back(u);
    }
    const double base = stats::krippendorff_alpha_point(units);
    std::vector<long> perm{0, 1, 2, 3};
    for (int t = 0; t < 50; ++t) {
        std::shuffle(perm.begin(), perm.end(), rng);
        auto relabeled = units;
        for (auto& u : relabeled)
            for (auto& x : u)
                if (x) x = perm[static_cast<std::size_t>(*x)];
        v.check(std::abs(stats::krippendorff_alpha_point(relabeled) - base) <= 1e-12, "relabeling invariance");
    }

    std::vector<Unit> random_coders;
    for (int i = 0; i < 20000; ++i) random_coders.push_back({static_cast<long>(rng() % 3), static_cast<long>(rng() % 3)});
    const double noise = stats::krippendorff_alpha_point(random_coders);
    v.check(std::abs(noise) < 0.05, fmt::format("random coders alpha {:.4f}", noise));
    if (v.pass) v.detail = fmt::format("oracle 134/153 to 1e-12, random coders alpha {:.4f}", noise);
    return v;
}

Verdict agreement_report() {
    Verdict v;
    const auto dir = fs::path(FORGE_FIXTURES) / "paper";
    const auto confusion = eval::compare_metrics(eval::read_runs_jsonl(dir / "agreement_runs.jsonl"),
                                                 eval::read_labels_csv(dir / "agreement_labels.csv"));
    const std::array<std::array<std::size_t, 2>, 2> expected{{{184, 6}, {1, 62}}};
    v.check(confusion.either.confusion == expected, "confusion matrix");
    const auto metric = eval::compare_metrics(eval::read_runs_jsonl(dir / "metric_runs.jsonl"),
                                              eval::read_labels_csv(dir / "metric_labels.csv"));
    const auto acc = fmt::format("{:.2f}", metric.either.accuracy);
    v.check(acc == "0.88", "accuracy " + acc);
    if (v.pass) v.detail = fmt::format("[[184, 6], [1, 62]], accuracy {} ({} items)", acc, metric.either.n);
    return v;
}

int cli(std::vector<std::string> args) {
    args.insert(args.begin(), "forge");
    std::ostringstream out, err;
    return cli::run(args, out, err, [](const std::string& name) -> std::optional<std::string> {
        if (name == "FORGE_LATEX_ENGINE") return FORGE_FAKE_ENGINE;
        return std::nullopt;
    });
}

// Manifests, results and stage reports; track records carry no timing
// data but are internal, so only the reports are compared.
std::map<std::string, std::string> snapshot(const fs::path& root) {
    std::map<std::string, std::string> files;
    for (const auto* sub : {"benchmark", "tracks", "results"})
        for (const auto& e : fs::recursive_directory_iterator(root / sub)) {
            if (!e.is_regular_file()) continue;
            const bool report = e.path().filename().string().rfind("stage_report", 0) == 0;
            if (std::string(sub) != "tracks" || report) files[fs::relative(e.path(), root).string()] = read_file(e.path());
        }
    return files;
}

Verdict end_to_end_determinism() {
    Verdict v;
    const auto papers = (testsupport::toy_dir() / "papers").string();
    const auto script = (testsupport::toy_dir() / "mock_script.json").string();
    std::vector<std::map<std::string, std::string>> runs;
    for (const auto* workers : {"1", "1", "4"}) {
        testsupport::TempDir dir;
        const auto root = dir.path().string();
        v.check(cli({"--data-root", root, "ingest", "--from", papers}) == 0, "ingest");
        v.check(cli({"--data-root", root, "--workers", workers, "--seed", "11", "forge", "--mock-script", script,
                     "--insertion-model", "mock:alpha", "--insertion-model", "mock:beta"}) == 0,
                "forge");
        v.check(cli({"--data-root", root, "--workers", workers, "evaluate", "--mock-script", script, "--identification-model",
                     "mock:alpha", "--identification-model", "mock:beta", "--identification-model", "mock:gamma"}) == 0,
                "evaluate");
        // Four pairs are too few for a usable bootstrap; stats still writes
        // its point estimates and reports a partial result.
        v.check(cli({"--data-root", root, "--workers", workers, "--seed", "11", "stats", "--resamples", "200"}) == cli::kExitPartial,
                "stats exit status");
        v.check(cli({"--data-root", root, "report"}) == 0, "report");
        runs.push_back(snapshot(dir.path()));
    }
    for (std::size_t i = 1; i < runs.size(); ++i) {
        v.check(runs[i].size() == runs[0].size(), "different file sets");
        for (const auto& [name, bytes] : runs[0]) {
            const auto it = runs[i].find(name);
            v.check(it != runs[i].end() && it->second == bytes, fmt::format("{} differs in run {}", name, i + 1));
        }
    }
    v.check(runs[0].count("results/report/table5.csv") && runs[0].count("benchmark/mock_alpha.jsonl"), "outputs missing");
    if (v.pass) v.detail = fmt::format("{} files identical over 3 runs (workers 1, 1, 4)", runs[0].size());
    return v;
}

Verdict stage_conservation() {
    Verdict v;
    testsupport::TempDir dir;
    testsupport::seed_toy_corpus(dir.path());
    auto gateway = testsupport::toy_gateway();
    std::size_t checked = 0;
    for (const auto* model : {"mock:alpha", "mock:beta"}) {
        pipeline::PipelineConfig cfg;
        cfg.data_root = dir.path();
        cfg.insertion_model = model;
        cfg.seed = 11;
        cfg.compile = testsupport::fake_compile();
        const auto result = pipeline::run_pipeline(cfg, *gateway);
        const auto& rep = result.report;

        std::size_t terminal = 0;
        for (const auto& [status, n] : rep.status_counts) {
            v.check(pipeline::is_terminal(pipeline::status_from_string(status)), "non-terminal status " + status);
            terminal += n;
        }
        v.check(terminal == rep.generated() && rep.generated() == result.records.size(), "generated != terminal");
        std::size_t prev = rep.generated();
        for (const auto& row : rep.rows) {
            if (row.stage <= pipeline::Stage::error_generation) continue;
            v.check(*row.errors + row.removed == prev, fmt::format("stage {} does not partition", pipeline::to_string(row.stage)));
            prev = *row.errors;
        }

        // Percentages in the written table against the raw counts.
        const auto csv = parse_csv(read_file(dir.path() / "tracks" / slugify(model) / "stage_report.csv"));
        for (std::size_t i = 1; i < csv.size(); ++i) {
            const auto& r = csv[i];
            const auto papers = std::stod(r[1]);
            v.check(std::abs(std::stod(r[2]) - 100.0 * papers / rep.papers_in) <= 0.05, "papers % in row " + r[0]);
            if (r[3] != "-") v.check(std::abs(std::stod(r[4]) - 100.0 * std::stod(r[3]) / rep.generated()) <= 0.05, "errors % in row " + r[0]);
            ++checked;
        }
    }
    if (v.pass) v.detail = fmt::format("2 tracks, {} table rows consistent", checked);
    return v;
}

struct Criterion {
    int id;
    std::string name;
    double limit_seconds;  // 0 for none
    std::function<Verdict()> run;
};

}  // namespace

int main() {
    spdlog::set_level(spdlog::level::err);
    const std::vector<Criterion> criteria{
        {1, "Levenshtein oracle equivalence", 5, levenshtein_oracle},
        {2, "sub-span metric oracle equivalence", 10, subspan_oracle},
        {3, "ratio matcher oracle equivalence", 5, ratio_oracle},
        {4, "property suite", 30, properties},
        {5, "published coefficients reproduce published accuracy", 0, published_coefficients},
        {6, "synthetic coefficient recovery and bootstrap coverage", 300, synthetic_recovery},
        {7, "Krippendorff's alpha", 30, alpha},
        {8, "agreement report fixtures", 0, agreement_report},
        {9, "end-to-end determinism", 60, end_to_end_determinism},
        {10, "stage conservation", 0, stage_conservation},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v.pass = false;
            v.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.limit_seconds > 0 && secs > c.limit_seconds && v.pass) {
            v.pass = false;
            v.detail = fmt::format("took {:.1f}s, limit {:.0f}s", secs, c.limit_seconds);
        }
        failed += !v.pass;
        std::cout << fmt::format("criterion {:>2}: {} {} ({}; {:.1f}s)", c.id, v.pass ? "PASS" : "FAIL", c.name, v.detail, secs)
                  << std::endl;
    }
    std::cout << fmt::format("{} of {} criteria passed", criteria.size() - static_cast<std::size_t>(failed), criteria.size())
              << std::endl;
    return failed;
}
