#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace forge::corpus {

// Lowercase, punctuation stripped, whitespace collapsed. Two titles match
// iff their normalized forms are equal.
std::string normalize_title(std::string_view title);

struct VenueQuery {
    std::string venue;     // empty: accept every record
    std::string decision;  // empty: accept every record
};

struct PaperStub {
    std::string paper_id;
    std::string title;
    std::optional<std::string> arxiv_id;
    std::optional<std::string> source_url;
    bool matched = false;
    std::vector<std::string> flags;  // "no_arxiv_match", "duplicate_title"
};

struct FetchResult {
    std::vector<PaperStub> stubs;
    std::vector<PaperStub> dropped_duplicates;
    std::size_t matched_count() const;
    std::size_t flagged_count() const;
};

// Title -> arXiv id lookup built from a JSON-lines file of {arxiv_id, title}.
class ArxivIndex {
public:
    ArxivIndex() = default;
    static ArxivIndex load(const std::filesystem::path& jsonl);
    void add(std::string_view title, std::string arxiv_id);
    std::optional<std::string> lookup(std::string_view title) const;
    std::size_t size() const noexcept { return by_title_.size(); }

private:
    std::unordered_map<std::string, std::string> by_title_;
};

// Produces the raw JSON-lines metadata payload for a venue query.
class MetadataSource {
public:
    virtual ~MetadataSource() = default;
    virtual std::string fetch(const VenueQuery& query) = 0;
};

class SnapshotFileSource final : public MetadataSource {
public:
    explicit SnapshotFileSource(std::filesystem::path path) : path_(std::move(path)) {}
    std::string fetch(const VenueQuery& query) override;

private:
    std::filesystem::path path_;
};

// GET <base_url><path>?venue=..&decision=..; non-2xx and connection
// failures raise TransportError.
class HttpMetadataSource final : public MetadataSource {
public:
    HttpMetadataSource(std::string base_url, std::string path) : base_url_(std::move(base_url)), path_(std::move(path)) {}
    std::string fetch(const VenueQuery& query) override;

private:
    std::string base_url_;
    std::string path_;
};

// Records are {paper_id, title, arxiv_id?, source_url?, venue?, decision?}.
// Each record is matched to arXiv by its own arxiv_id or by exact normalized
// title; unmatched records are kept and flagged. Duplicate titles keep the
// first record, flag it, and report the rest.
FetchResult fetch_accepted_papers(const VenueQuery& query, MetadataSource& source, const ArxivIndex& index);

}  // namespace forge::corpus
