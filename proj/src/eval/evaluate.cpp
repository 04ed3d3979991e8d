#include "forge/eval/evaluate.hpp"

#include <algorithm>
#include <set>
#include <tuple>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "forge/common/error.hpp"
#include "forge/common/fs.hpp"
#include "forge/common/parallel.hpp"
#include "forge/pipeline/store.hpp"

namespace forge::eval {

std::filesystem::path run_path(const std::filesystem::path& data_root, const std::string& model_id,
                               const std::string& pair_id) {
    return data_root / "runs" / slugify(model_id) / (pair_id + ".json");
}

std::filesystem::path results_dir(const std::filesystem::path& data_root) { return data_root / "results"; }

std::vector<IdentificationRun> read_runs_jsonl(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw LookupError("run file not found: " + path.string());
    std::vector<IdentificationRun> runs;
    for (const auto& j : read_jsonl(path)) runs.push_back(j.get<IdentificationRun>());
    return runs;
}

EvaluationResult evaluate_benchmark(const EvaluationConfig& cfg, llm::Gateway& gateway) {
    if (cfg.identification_models.empty()) throw ConfigError("no identification models configured");
    if (!(cfg.identify_threshold > 0.0 && cfg.identify_threshold < 1.0))
        throw ConfigError(fmt::format("identify threshold {} outside (0, 1)", cfg.identify_threshold));
    std::vector<std::string> models = cfg.identification_models;
    std::sort(models.begin(), models.end());
    models.erase(std::unique(models.begin(), models.end()), models.end());
    for (const auto& m : models)
        if (!gateway.knows(m)) throw ConfigError("no provider for " + m);

    const auto pairs = pipeline::load_benchmark(cfg.data_root);
    if (pairs.empty()) throw LookupError("no benchmark pairs under " + (cfg.data_root / "benchmark").string());
    std::set<std::string> judges;
    for (const auto& p : pairs) judges.insert(cfg.judge_model.value_or(p.insertion_model_id));
    for (const auto& j : judges)
        if (!gateway.knows(j)) throw ConfigError("no provider for judge " + j);

    const std::size_t n = pairs.size() * models.size();
    std::vector<std::optional<IdentificationRun>> slots(n);
    std::vector<std::string> errors(n);
    parallel_for(n, cfg.workers, [&](std::size_t i) {
        const auto& pair = pairs[i / models.size()];
        const auto& model = models[i % models.size()];
        const auto path = run_path(cfg.data_root, model, pair.pair_id);
        if (std::filesystem::exists(path)) {
            auto saved = nlohmann::json::parse(read_file(path)).get<IdentificationRun>();
            if (saved.scored) {
                slots[i] = std::move(saved);
                return;
            }
        }
        try {
            auto run = run_identification(pair, cfg.data_root, gateway, model, cfg.max_retries);
            score_run(run, pair, gateway, cfg.judge_model.value_or(pair.insertion_model_id), cfg.max_retries,
                      cfg.identify_threshold);
            write_file_atomic(path, nlohmann::json(run).dump(2) + "\n");
            slots[i] = std::move(run);
        } catch (const ConfigError&) {
            throw;
        } catch (const EnvironmentError&) {
            throw;
        } catch (const ContractError&) {
            throw;
        } catch (const Error& e) {
            spdlog::error("{} {}: {}", pair.pair_id, model, e.what());
            errors[i] = fmt::format("{} {}: {}", pair.pair_id, model, e.what());
        }
    });

    EvaluationResult result;
    for (std::size_t i = 0; i < n; ++i) {
        if (slots[i]) result.runs.push_back(std::move(*slots[i]));
        if (!errors[i].empty()) result.failures.push_back(std::move(errors[i]));
    }
    std::sort(result.runs.begin(), result.runs.end(), [](const auto& a, const auto& b) {
        return std::tie(a.pair_id, a.identification_model_id) < std::tie(b.pair_id, b.identification_model_id);
    });
    result.outcomes = build_outcome_matrix(result.runs);

    const auto dir = results_dir(cfg.data_root);
    std::vector<nlohmann::json> lines;
    for (const auto& r : result.runs) lines.push_back(r);
    write_file_atomic(dir / "runs.jsonl", to_jsonl(lines));
    write_file_atomic(dir / "outcomes.csv", outcomes_to_csv(result.outcomes));
    const auto cells = accuracy_table(result.outcomes);
    write_file_atomic(dir / "table4.csv", accuracy_table_csv(cells));
    spdlog::info("evaluation: {} runs, {} failed", result.runs.size(), result.failures.size());
    return result;
}

}  // namespace forge::eval
