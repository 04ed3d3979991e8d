#include "forge/eval/outcomes.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include <fmt/format.h>

#include "forge/common/csv.hpp"
#include "forge/common/error.hpp"
#include "forge/common/fs.hpp"

namespace forge::eval {

bool excerpt_matches(const ExcerptScore& s, Metric metric) {
    switch (metric) {
        case Metric::lev: return s.lev_match;
        case Metric::judge: return s.judge_match;
        case Metric::either: break;
    }
    return s.matched();
}

OutcomeRow outcome_of(const IdentificationRun& run, Metric metric) {
    if (!run.scored) throw ContractError(run.pair_id + " " + run.identification_model_id + ": run not scored");
    OutcomeRow row{run.pair_id, run.insertion_model_id, run.identification_model_id, {}, run.excerpts.size()};
    const auto n = std::min<std::size_t>(run.per_excerpt.size(), kMaxK);
    for (std::size_t rank = 0; rank < n; ++rank) {
        if (!excerpt_matches(run.per_excerpt[rank], metric)) continue;
        std::fill(row.identified_at_k.begin() + static_cast<std::ptrdiff_t>(rank), row.identified_at_k.end(), true);
        break;
    }
    return row;
}

std::vector<OutcomeRow> build_outcome_matrix(std::span<const IdentificationRun> runs, Metric metric) {
    std::vector<OutcomeRow> rows;
    rows.reserve(runs.size());
    for (const auto& r : runs) rows.push_back(outcome_of(r, metric));
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        return std::tie(a.pair_id, a.identification_model_id) < std::tie(b.pair_id, b.identification_model_id);
    });
    return rows;
}

std::string outcomes_to_csv(std::span<const OutcomeRow> rows) {
    std::vector<std::string> header{"pair_id", "insertion_model_id", "identification_model_id"};
    for (int k = 1; k <= kMaxK; ++k) header.push_back(fmt::format("k{}", k));
    header.push_back("n_candidates");
    std::string out = csv_row(header);
    for (const auto& r : rows) {
        std::vector<std::string> f{r.pair_id, r.insertion_model_id, r.identification_model_id};
        for (bool b : r.identified_at_k) f.push_back(b ? "1" : "0");
        f.push_back(r.n_candidates ? std::to_string(*r.n_candidates) : "");
        out += csv_row(f);
    }
    return out;
}

namespace {

bool parse_bit(const std::string& s, const std::string& where) {
    if (s == "1" || s == "true") return true;
    if (s == "0" || s == "false") return false;
    throw ParseError(fmt::format("{}: expected 0 or 1, got '{}'", where, s), s);
}

}  // namespace

std::vector<OutcomeRow> parse_outcomes_csv(std::string_view text) {
    const auto table = parse_csv(text);
    if (table.empty()) throw ParseError("outcome file is empty", "");
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < table[0].size(); ++i) col[table[0][i]] = i;
    std::vector<std::string> required{"pair_id", "insertion_model_id", "identification_model_id"};
    for (int k = 1; k <= kMaxK; ++k) required.push_back(fmt::format("k{}", k));
    for (const auto& name : required)
        if (!col.count(name)) throw ParseError("outcome file lacks column " + name, csv_row(table[0]));
    const auto candidates = col.find("n_candidates");

    std::vector<OutcomeRow> rows;
    for (std::size_t line = 1; line < table.size(); ++line) {
        const auto& f = table[line];
        const auto where = fmt::format("outcomes line {}", line + 1);
        if (f.size() != table[0].size()) throw ParseError(where + ": wrong number of fields", csv_row(f));
        OutcomeRow r;
        r.pair_id = f[col["pair_id"]];
        r.insertion_model_id = f[col["insertion_model_id"]];
        r.identification_model_id = f[col["identification_model_id"]];
        if (r.pair_id.empty() || r.insertion_model_id.empty() || r.identification_model_id.empty())
            throw ParseError(where + ": empty id", csv_row(f));
        for (int k = 1; k <= kMaxK; ++k) {
            r.identified_at_k[static_cast<std::size_t>(k - 1)] = parse_bit(f[col[fmt::format("k{}", k)]], where);
            if (k > 1 && r.at(k - 1) && !r.at(k)) throw ParseError(where + ": identified@k decreases", csv_row(f));
        }
        if (candidates != col.end() && !f[candidates->second].empty()) {
            try {
                r.n_candidates = std::stoul(f[candidates->second]);
            } catch (const std::exception&) {
                throw ParseError(where + ": bad n_candidates", csv_row(f));
            }
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<OutcomeRow> read_outcomes_csv(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw LookupError("outcome file not found: " + path.string());
    return parse_outcomes_csv(read_file(path));
}

double AccuracyCell::accuracy(int k) const {
    if (support == 0) return 0.0;
    return static_cast<double>(hits.at(static_cast<std::size_t>(k - 1))) / static_cast<double>(support);
}

std::vector<AccuracyCell> accuracy_table(std::span<const OutcomeRow> rows) {
    std::map<std::pair<std::string, std::string>, AccuracyCell> cells;
    std::map<std::string, AccuracyCell> pooled;
    const auto add = [](AccuracyCell& c, const OutcomeRow& r) {
        ++c.support;
        for (int k = 1; k <= kMaxK; ++k) c.hits[static_cast<std::size_t>(k - 1)] += r.at(k) ? 1 : 0;
    };
    for (const auto& r : rows) {
        auto& c = cells[{r.insertion_model_id, r.identification_model_id}];
        c.insertion_model_id = r.insertion_model_id;
        c.identification_model_id = r.identification_model_id;
        add(c, r);
        auto& p = pooled[r.identification_model_id];
        p.insertion_model_id = std::string(kPooled);
        p.identification_model_id = r.identification_model_id;
        add(p, r);
    }
    std::vector<AccuracyCell> out;
    for (auto& [_, c] : pooled) out.push_back(std::move(c));
    for (auto& [_, c] : cells) out.push_back(std::move(c));
    return out;
}

std::string accuracy_table_csv(std::span<const AccuracyCell> cells) {
    std::vector<std::string> header{"insertion_model_id", "identification_model_id", "support"};
    for (int k = 1; k <= kMaxK; ++k) header.push_back(fmt::format("k{}", k));
    std::string out = csv_row(header);
    for (const auto& c : cells) {
        std::vector<std::string> f{c.insertion_model_id, c.identification_model_id, std::to_string(c.support)};
        for (int k = 1; k <= kMaxK; ++k) f.push_back(fmt::format("{:.3f}", c.accuracy(k)));
        out += csv_row(f);
    }
    return out;
}

}  // namespace forge::eval
