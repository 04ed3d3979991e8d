#include "forge/eval/labels.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include <fmt/format.h>

#include "forge/common/csv.hpp"
#include "forge/common/error.hpp"
#include "forge/common/fs.hpp"

namespace forge::eval {

std::vector<HumanLabel> parse_labels_csv(std::string_view text) {
    const auto table = parse_csv(text);
    if (table.empty()) throw ParseError("label file is empty", "");
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < table[0].size(); ++i) col[table[0][i]] = i;
    for (const auto* name : {"pair_id", "identification_model_id", "human_identified", "annotator_id"})
        if (!col.count(name)) throw ParseError(fmt::format("label file lacks column {}", name), csv_row(table[0]));

    std::vector<HumanLabel> labels;
    for (std::size_t line = 1; line < table.size(); ++line) {
        const auto& f = table[line];
        if (f.size() != table[0].size())
            throw ParseError(fmt::format("labels line {}: wrong number of fields", line + 1), csv_row(f));
        HumanLabel l{f[col["pair_id"]], f[col["identification_model_id"]], false, f[col["annotator_id"]]};
        const auto& v = f[col["human_identified"]];
        if (v != "0" && v != "1")
            throw ParseError(fmt::format("labels line {}: human_identified must be 0 or 1", line + 1), v);
        l.human_identified = v == "1";
        if (l.pair_id.empty() || l.identification_model_id.empty())
            throw ParseError(fmt::format("labels line {}: empty id", line + 1), csv_row(f));
        labels.push_back(std::move(l));
    }
    return labels;
}

std::vector<HumanLabel> read_labels_csv(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw LookupError("label file not found: " + path.string());
    return parse_labels_csv(read_file(path));
}

std::optional<bool> LabeledItem::agreed() const {
    if (labels.empty()) return std::nullopt;
    const bool first = labels.front().second;
    for (const auto& [_, v] : labels)
        if (v != first) return std::nullopt;
    return first;
}

std::vector<LabeledItem> group_labels(std::span<const HumanLabel> labels) {
    std::map<std::pair<std::string, std::string>, LabeledItem> items;
    for (const auto& l : labels) {
        auto& item = items[{l.pair_id, l.identification_model_id}];
        item.pair_id = l.pair_id;
        item.identification_model_id = l.identification_model_id;
        for (const auto& [annotator, _] : item.labels)
            if (annotator == l.annotator_id)
                throw ContractError(fmt::format("{} {}: annotator '{}' labels the item twice", l.pair_id,
                                                l.identification_model_id, annotator));
        item.labels.emplace_back(l.annotator_id, l.human_identified);
    }
    std::vector<LabeledItem> out;
    for (auto& [_, item] : items) {
        std::sort(item.labels.begin(), item.labels.end());
        out.push_back(std::move(item));
    }
    return out;
}

namespace {

ClassStats class_stats(std::size_t tp, std::size_t fp, std::size_t fn) {
    ClassStats s;
    s.support = tp + fn;
    s.precision = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    s.recall = tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    s.f1 = s.precision + s.recall > 0 ? 2 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
    return s;
}

nlohmann::json class_json(const ClassStats& s) {
    return {{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}, {"support", s.support}};
}

}  // namespace

BinaryReport binary_report(const std::vector<bool>& truth, const std::vector<bool>& predicted) {
    if (truth.size() != predicted.size()) throw ContractError("truth and prediction lengths differ");
    BinaryReport r;
    r.n = truth.size();
    for (std::size_t i = 0; i < truth.size(); ++i) ++r.confusion[truth[i] ? 1 : 0][predicted[i] ? 1 : 0];
    const auto& c = r.confusion;
    r.identified = class_stats(c[1][1], c[0][1], c[1][0]);
    r.not_identified = class_stats(c[0][0], c[1][0], c[0][1]);
    r.accuracy = r.n ? static_cast<double>(c[0][0] + c[1][1]) / static_cast<double>(r.n) : 0.0;
    return r;
}

std::string BinaryReport::to_text(std::string_view title) const {
    std::string out = fmt::format("{}\n", title);
    out += fmt::format("  {:<16}{:>10}{:>10}{:>10}{:>10}\n", "", "precision", "recall", "f1", "support");
    for (const auto& [name, s] : {std::pair{"not identified", &not_identified}, std::pair{"identified", &identified}})
        out += fmt::format("  {:<16}{:>10.2f}{:>10.2f}{:>10.2f}{:>10}\n", name, s->precision, s->recall, s->f1, s->support);
    out += fmt::format("  {:<16}{:>30.3f}{:>10}\n", "accuracy", accuracy, n);
    out += fmt::format("  confusion (rows human, cols automatic): [[{}, {}], [{}, {}]]\n", confusion[0][0],
                       confusion[0][1], confusion[1][0], confusion[1][1]);
    return out;
}

nlohmann::json BinaryReport::to_json() const {
    return {{"confusion", {{confusion[0][0], confusion[0][1]}, {confusion[1][0], confusion[1][1]}}},
            {"not_identified", class_json(not_identified)},
            {"identified", class_json(identified)},
            {"accuracy", accuracy},
            {"n", n}};
}

bool identified_by(const IdentificationRun& run, Metric metric, int k) {
    if (!run.scored) throw ContractError(run.pair_id + " " + run.identification_model_id + ": run not scored");
    const auto n = std::min<std::size_t>(run.per_excerpt.size(), static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < n; ++i)
        if (excerpt_matches(run.per_excerpt[i], metric)) return true;
    return false;
}

MetricComparison compare_metrics(std::span<const IdentificationRun> runs, std::span<const HumanLabel> labels, int k) {
    std::map<std::pair<std::string, std::string>, const IdentificationRun*> by_key;
    for (const auto& r : runs)
        if (!by_key.emplace(std::pair{r.pair_id, r.identification_model_id}, &r).second)
            throw ContractError(fmt::format("duplicate run for {} {}", r.pair_id, r.identification_model_id));

    const auto items = group_labels(labels);
    std::vector<std::string> unknown;
    for (const auto& item : items)
        if (!by_key.count({item.pair_id, item.identification_model_id}))
            unknown.push_back(item.pair_id + " " + item.identification_model_id);
    if (!unknown.empty()) {
        std::string listed;
        for (std::size_t i = 0; i < unknown.size() && i < 10; ++i) listed += "\n  " + unknown[i];
        if (unknown.size() > 10) listed += fmt::format("\n  ... and {} more", unknown.size() - 10);
        throw LookupError(fmt::format("{} labeled item(s) have no identification run:{}", unknown.size(), listed));
    }

    MetricComparison out;
    out.items = items.size();
    std::vector<bool> truth, lev, judge, either;
    for (const auto& item : items) {
        const auto agreed = item.agreed();
        if (!agreed) {
            ++out.disagreements;
            continue;
        }
        const auto& run = *by_key.at({item.pair_id, item.identification_model_id});
        truth.push_back(*agreed);
        lev.push_back(identified_by(run, Metric::lev, k));
        judge.push_back(identified_by(run, Metric::judge, k));
        either.push_back(identified_by(run, Metric::either, k));
    }
    out.either = binary_report(truth, either);
    out.lev = binary_report(truth, lev);
    out.judge = binary_report(truth, judge);
    return out;
}

}  // namespace forge::eval
