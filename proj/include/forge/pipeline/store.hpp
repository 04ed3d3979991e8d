#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "forge/corpus/paper.hpp"
#include "forge/pipeline/records.hpp"

namespace forge::pipeline {

// On-disk layout under the data root:
//   corpus/<paper>.json                  flattened PaperSource
//   tracks/<model>/claims/<paper>.json   claim extraction result
//   tracks/<model>/errors/<error>.json   ErrorRecord, rewritten after each stage
//   tracks/<model>/errors/<error>.dropped.json
//   modified/<paper>/<error>.tex
//   pdfs/<paper>/<error>.pdf
//   benchmark/<model>.jsonl              sampled PaperErrorPair manifest
// Every write is atomic, one file per record.
class RecordStore {
public:
    explicit RecordStore(std::filesystem::path data_root);

    const std::filesystem::path& root() const noexcept { return root_; }
    std::filesystem::path corpus_dir() const { return root_ / "corpus"; }
    std::filesystem::path track_dir(std::string_view model_id) const;
    std::filesystem::path manifest_path(std::string_view model_id) const;
    std::filesystem::path benchmark_dir() const { return root_ / "benchmark"; }

    static std::string modified_rel(std::string_view paper_id, std::string_view error_id);
    static std::string pdf_rel(std::string_view paper_id, std::string_view error_id);

    void save_paper(const corpus::PaperSource& paper) const;
    // Papers sorted by id. An explicit directory overrides corpus/.
    std::vector<corpus::PaperSource> load_corpus(const std::optional<std::filesystem::path>& dir = {}) const;

    std::optional<nlohmann::json> load_claims(std::string_view model_id, std::string_view paper_id) const;
    void save_claims(std::string_view model_id, std::string_view paper_id, const nlohmann::json& claims) const;

    std::optional<ErrorRecord> load_record(std::string_view model_id, std::string_view error_id) const;
    void save_record(const ErrorRecord& record) const;
    std::optional<std::string> load_dropped(std::string_view model_id, std::string_view error_id) const;
    void save_dropped(std::string_view model_id, std::string_view error_id, std::string_view reason) const;

    void save_modified(std::string_view paper_id, std::string_view error_id, std::string_view latex) const;
    std::string load_modified(std::string_view paper_id, std::string_view error_id) const;

private:
    std::filesystem::path root_;
};

std::vector<PaperErrorPair> read_manifest(const std::filesystem::path& path);
std::string write_manifest(const std::filesystem::path& path, const std::vector<PaperErrorPair>& pairs);

// Every benchmark/*.jsonl manifest under the data root, in file-name order.
std::vector<PaperErrorPair> load_benchmark(const std::filesystem::path& data_root);

}  // namespace forge::pipeline
