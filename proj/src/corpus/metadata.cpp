#include "forge/corpus/metadata.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <unordered_set>

#include <fmt/format.h>
#include <httplib.h>
#include <json.hpp>

#include "forge/common/error.hpp"
#include "forge/common/fs.hpp"

namespace forge::corpus {

std::string normalize_title(std::string_view title) {
    std::string out;
    out.reserve(title.size());
    bool pending_space = false;
    for (unsigned char c : title) {
        if (std::isspace(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (c < 0x80 && std::ispunct(c)) continue;
        if (pending_space) out.push_back(' ');
        pending_space = false;
        out.push_back(static_cast<char>(std::tolower(c)));
    }
    return out;
}

std::size_t FetchResult::matched_count() const {
    return static_cast<std::size_t>(std::count_if(stubs.begin(), stubs.end(), [](const PaperStub& s) { return s.matched; }));
}

std::size_t FetchResult::flagged_count() const {
    return static_cast<std::size_t>(std::count_if(stubs.begin(), stubs.end(), [](const PaperStub& s) { return !s.flags.empty(); }));
}

ArxivIndex ArxivIndex::load(const std::filesystem::path& jsonl) {
    ArxivIndex index;
    for (const auto& rec : read_jsonl(jsonl)) {
        if (!rec.contains("arxiv_id") || !rec.contains("title")) {
            throw ParseError("arXiv index record lacks arxiv_id/title", rec.dump());
        }
        index.add(rec["title"].get<std::string>(), rec["arxiv_id"].get<std::string>());
    }
    return index;
}

void ArxivIndex::add(std::string_view title, std::string arxiv_id) {
    by_title_.emplace(normalize_title(title), std::move(arxiv_id));
}

std::optional<std::string> ArxivIndex::lookup(std::string_view title) const {
    auto it = by_title_.find(normalize_title(title));
    if (it == by_title_.end()) return std::nullopt;
    return it->second;
}

std::string SnapshotFileSource::fetch(const VenueQuery&) {
    if (!std::filesystem::exists(path_)) throw EnvironmentError(fmt::format("metadata snapshot {} not found", path_.string()));
    return read_file(path_);
}

std::string HttpMetadataSource::fetch(const VenueQuery& query) {
    httplib::Client client(base_url_);
    client.set_connection_timeout(10);
    client.set_read_timeout(60);
    httplib::Params params;
    if (!query.venue.empty()) params.emplace("venue", query.venue);
    if (!query.decision.empty()) params.emplace("decision", query.decision);
    auto res = client.Get(path_, params, httplib::Headers{});
    if (!res) throw TransportError(fmt::format("metadata request to {} failed: {}", base_url_, httplib::to_string(res.error())));
    if (res->status < 200 || res->status >= 300) {
        throw TransportError(fmt::format("metadata request to {} returned HTTP {}", base_url_, res->status));
    }
    return res->body;
}

namespace {

std::optional<std::string> opt_string(const nlohmann::json& rec, const char* key) {
    if (!rec.contains(key) || rec[key].is_null()) return std::nullopt;
    if (!rec[key].is_string()) throw ParseError(fmt::format("field {} is not a string", key), rec.dump());
    auto s = rec[key].get<std::string>();
    if (s.empty()) return std::nullopt;
    return s;
}

bool passes_query(const nlohmann::json& rec, const VenueQuery& q) {
    auto field_ok = [&](const char* key, const std::string& want) {
        if (want.empty() || !rec.contains(key) || !rec[key].is_string()) return true;
        return normalize_title(rec[key].get<std::string>()) == normalize_title(want);
    };
    return field_ok("venue", q.venue) && field_ok("decision", q.decision);
}

}  // namespace

FetchResult fetch_accepted_papers(const VenueQuery& query, MetadataSource& source, const ArxivIndex& index) {
    const std::string payload = source.fetch(query);
    FetchResult result;
    std::unordered_map<std::string, std::size_t> by_title;
    std::unordered_set<std::string> ids;
    std::istringstream in(payload);
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json rec;
        try {
            rec = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(fmt::format("malformed metadata record: {}", e.what()), line);
        }
        if (!rec.is_object() || !rec.contains("paper_id") || !rec.contains("title") || !rec["paper_id"].is_string() ||
            !rec["title"].is_string()) {
            throw ParseError("metadata record lacks string paper_id/title", line);
        }
        if (!passes_query(rec, query)) continue;

        PaperStub stub;
        stub.paper_id = rec["paper_id"].get<std::string>();
        stub.title = rec["title"].get<std::string>();
        stub.arxiv_id = opt_string(rec, "arxiv_id");
        stub.source_url = opt_string(rec, "source_url");
        if (!stub.arxiv_id) stub.arxiv_id = index.lookup(stub.title);
        stub.matched = stub.arxiv_id.has_value();
        if (!stub.matched) stub.flags.emplace_back("no_arxiv_match");

        const auto key = normalize_title(stub.title);
        if (auto it = by_title.find(key); it != by_title.end() || ids.count(stub.paper_id)) {
            if (it != by_title.end()) {
                auto& kept = result.stubs[it->second].flags;
                if (std::find(kept.begin(), kept.end(), "duplicate_title") == kept.end()) kept.emplace_back("duplicate_title");
            }
            stub.flags.emplace_back(it != by_title.end() ? "duplicate_title" : "duplicate_id");
            result.dropped_duplicates.push_back(std::move(stub));
            continue;
        }
        by_title.emplace(key, result.stubs.size());
        ids.insert(stub.paper_id);
        result.stubs.push_back(std::move(stub));
    }
    return result;
}

}  // namespace forge::corpus
