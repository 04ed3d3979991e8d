#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "forge/corpus/compile.hpp"
#include "forge/llm/gateway.hpp"
#include "forge/pipeline/records.hpp"
#include "forge/pipeline/store.hpp"
#include "forge/textmatch/subspan.hpp"

namespace forge::pipeline {

struct PipelineConfig {
    std::filesystem::path data_root;
    std::optional<std::filesystem::path> papers_dir;  // defaults to <data_root>/corpus
    std::string insertion_model;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
    std::size_t max_claims_per_paper = 0;  // 0 = all
    int errors_per_claim = 1;
    int max_retries = 1;  // refusal retries per call
    double replace_threshold = textmatch::kReplaceThreshold;
    double identify_threshold = textmatch::kIdentifyThreshold;
    corpus::CompileOptions compile;
    std::optional<Stage> stop_after;  // leave later stages for a resumed run
};

struct StageRow {
    Stage stage;
    std::size_t papers = 0;
    std::optional<std::size_t> errors;  // none for claim extraction
    std::size_t removed = 0;            // records whose terminal stage is this one
};

struct StageReport {
    std::string insertion_model_id;
    std::size_t papers_in = 0;
    std::size_t claims = 0;
    std::size_t duplicate_claims = 0;
    std::size_t claim_failures = 0;
    std::map<std::string, std::size_t> dropped;  // generation drop reason -> count
    std::map<std::string, std::size_t> status_counts;
    std::vector<StageRow> rows;  // claim_extraction .. compilation
    std::size_t benchmark_papers = 0;
    std::size_t benchmark_pairs = 0;

    std::size_t generated() const;
    std::string to_csv() const;
    std::string to_text() const;
    nlohmann::json to_json() const;
};

// Percentage with one decimal, "-" when the base is zero.
std::string percent(std::size_t part, std::size_t base);

StageReport make_stage_report(const std::string& model_id, std::size_t papers_in,
                              const std::vector<nlohmann::json>& claim_files, const std::vector<ErrorRecord>& records,
                              const std::map<std::string, std::size_t>& dropped,
                              const std::vector<PaperErrorPair>& pairs);

// Compiles every survived record into <data_root>/pdfs/<paper>/<error>.pdf;
// status becomes compiled or compile_failed.
void compile_survivors(std::vector<ErrorRecord>& records, const RecordStore& store,
                       const corpus::CompileOptions& options, std::size_t workers);

// One compiled record per (paper, insertion model), drawn uniformly with a
// generator seeded from (seed, paper, model); output sorted by pair id.
std::vector<PaperErrorPair> sample_benchmark(const std::vector<ErrorRecord>& records, const RecordStore& store,
                                             std::uint64_t seed);

std::vector<PaperErrorPair> build_benchmark(std::vector<ErrorRecord>& records, const RecordStore& store,
                                            std::uint64_t seed, const corpus::CompileOptions& options,
                                            std::size_t workers);

struct PipelineResult {
    std::vector<ErrorRecord> records;
    std::vector<PaperErrorPair> pairs;
    StageReport report;
    bool complete = false;  // false when stopped early via stop_after
};

// Runs or resumes one insertion track. Persisted claims, records and
// tombstones are reused, so a crashed run continues where it stopped.
// Writes the manifest and tracks/<model>/stage_report.{csv,txt,json}.
PipelineResult run_pipeline(const PipelineConfig& config, llm::Gateway& gateway);

}  // namespace forge::pipeline
