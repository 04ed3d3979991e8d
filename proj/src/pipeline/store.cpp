#include "forge/pipeline/store.hpp"

#include <algorithm>

#include "forge/common/error.hpp"
#include "forge/common/fs.hpp"

namespace forge::pipeline {

namespace {

std::optional<json> read_json_if_exists(const fs::path& path) {
    if (!fs::exists(path)) return std::nullopt;
    const auto text = read_file(path);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what(), text);
    }
}

}  // namespace

RecordStore::RecordStore(fs::path data_root) : root_(std::move(data_root)) {}

fs::path RecordStore::track_dir(std::string_view model_id) const { return root_ / "tracks" / slugify(model_id); }

fs::path RecordStore::manifest_path(std::string_view model_id) const {
    return benchmark_dir() / (slugify(model_id) + ".jsonl");
}

std::string RecordStore::modified_rel(std::string_view paper_id, std::string_view error_id) {
    return "modified/" + std::string(paper_id) + "/" + std::string(error_id) + ".tex";
}

std::string RecordStore::pdf_rel(std::string_view paper_id, std::string_view error_id) {
    return "pdfs/" + std::string(paper_id) + "/" + std::string(error_id) + ".pdf";
}

void RecordStore::save_paper(const corpus::PaperSource& paper) const {
    write_file_atomic(corpus_dir() / (paper.paper_id + ".json"), json(paper).dump(2) + "\n");
}

std::vector<corpus::PaperSource> RecordStore::load_corpus(const std::optional<fs::path>& dir) const {
    const auto from = dir.value_or(corpus_dir());
    std::vector<corpus::PaperSource> papers;
    if (!fs::is_directory(from)) return papers;
    for (const auto& entry : fs::directory_iterator(from)) {
        if (entry.path().extension() != ".json") continue;
        auto j = read_json_if_exists(entry.path());
        auto paper = j->get<corpus::PaperSource>();
        corpus::validate_paper(paper);
        papers.push_back(std::move(paper));
    }
    std::sort(papers.begin(), papers.end(), [](const auto& a, const auto& b) { return a.paper_id < b.paper_id; });
    for (std::size_t i = 1; i < papers.size(); ++i)
        if (papers[i].paper_id == papers[i - 1].paper_id)
            throw ContractError("duplicate paper_id in corpus: " + papers[i].paper_id);
    return papers;
}

std::optional<json> RecordStore::load_claims(std::string_view model_id, std::string_view paper_id) const {
    return read_json_if_exists(track_dir(model_id) / "claims" / (std::string(paper_id) + ".json"));
}

void RecordStore::save_claims(std::string_view model_id, std::string_view paper_id, const json& claims) const {
    write_file_atomic(track_dir(model_id) / "claims" / (std::string(paper_id) + ".json"), claims.dump(2) + "\n");
}

std::optional<ErrorRecord> RecordStore::load_record(std::string_view model_id, std::string_view error_id) const {
    auto j = read_json_if_exists(track_dir(model_id) / "errors" / (std::string(error_id) + ".json"));
    if (!j) return std::nullopt;
    return j->get<ErrorRecord>();
}

void RecordStore::save_record(const ErrorRecord& record) const {
    write_file_atomic(track_dir(record.insertion_model_id) / "errors" / (record.error_id + ".json"),
                      json(record).dump(2) + "\n");
}

std::optional<std::string> RecordStore::load_dropped(std::string_view model_id, std::string_view error_id) const {
    auto j = read_json_if_exists(track_dir(model_id) / "errors" / (std::string(error_id) + ".dropped.json"));
    if (!j) return std::nullopt;
    return j->at("reason").get<std::string>();
}

void RecordStore::save_dropped(std::string_view model_id, std::string_view error_id, std::string_view reason) const {
    const json j = {{"error_id", error_id}, {"reason", reason}};
    write_file_atomic(track_dir(model_id) / "errors" / (std::string(error_id) + ".dropped.json"), j.dump(2) + "\n");
}

void RecordStore::save_modified(std::string_view paper_id, std::string_view error_id, std::string_view latex) const {
    write_file_atomic(root_ / modified_rel(paper_id, error_id), latex);
}

std::string RecordStore::load_modified(std::string_view paper_id, std::string_view error_id) const {
    return read_file(root_ / modified_rel(paper_id, error_id));
}

std::vector<PaperErrorPair> read_manifest(const fs::path& path) {
    std::vector<PaperErrorPair> pairs;
    for (const auto& j : read_jsonl(path)) pairs.push_back(j.get<PaperErrorPair>());
    return pairs;
}

std::string write_manifest(const fs::path& path, const std::vector<PaperErrorPair>& pairs) {
    std::vector<json> lines;
    lines.reserve(pairs.size());
    for (const auto& p : pairs) lines.push_back(p);
    auto text = to_jsonl(lines);
    write_file_atomic(path, text);
    return text;
}

std::vector<PaperErrorPair> load_benchmark(const fs::path& data_root) {
    const auto dir = data_root / "benchmark";
    std::vector<fs::path> files;
    if (fs::is_directory(dir))
        for (const auto& entry : fs::directory_iterator(dir))
            if (entry.path().extension() == ".jsonl") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    std::vector<PaperErrorPair> pairs;
    for (const auto& f : files) {
        auto part = read_manifest(f);
        pairs.insert(pairs.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
    }
    return pairs;
}

}  // namespace forge::pipeline
