#include "forge/stats/agreement.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include <fmt/format.h>

#include "forge/common/error.hpp"
#include "forge/common/parallel.hpp"
#include "forge/stats/bootstrap.hpp"

namespace forge::stats {

namespace {

// Coincidences of one unit: every ordered pair of values from different
// coders, weighted 1 / (m - 1).
struct Coincidences {
    std::map<std::pair<long, long>, double> o;
    std::size_t pairable = 0;
    std::size_t items = 0;
};

void add_unit(Coincidences& acc, const Unit& unit) {
    std::vector<long> values;
    for (const auto& v : unit)
        if (v) values.push_back(*v);
    if (values.size() < 2) return;
    const double w = 1.0 / static_cast<double>(values.size() - 1);
    for (std::size_t a = 0; a < values.size(); ++a)
        for (std::size_t b = 0; b < values.size(); ++b)
            if (a != b) acc.o[{values[a], values[b]}] += w;
    acc.pairable += values.size();
    ++acc.items;
}

std::optional<double> alpha_of(const Coincidences& c) {
    if (c.pairable == 0) return std::nullopt;
    std::map<long, double> marginal;
    double observed = 0.0;
    for (const auto& [ck, v] : c.o) {
        marginal[ck.first] += v;
        if (ck.first != ck.second) observed += v;
    }
    if (observed == 0.0) return 1.0;
    const double n = static_cast<double>(c.pairable);
    double sum_sq = 0.0;
    for (const auto& [_, m] : marginal) sum_sq += m * m;
    const double expected = n * n - sum_sq;  // sum over c != k of n_c n_k
    return 1.0 - (n - 1.0) * observed / expected;
}

}  // namespace

double krippendorff_alpha_point(std::span<const Unit> units) {
    Coincidences c;
    for (const auto& u : units) add_unit(c, u);
    const auto a = alpha_of(c);
    if (!a) throw UndefinedInputError("alpha: no item has two coded values");
    return *a;
}

AgreementResult krippendorff_alpha(std::span<const Unit> units, const AlphaOptions& options) {
    AgreementResult r;
    Coincidences c;
    for (const auto& u : units) {
        add_unit(c, u);
        r.n_coders = std::max(r.n_coders, u.size());
    }
    const auto a = alpha_of(c);
    if (!a) throw UndefinedInputError("alpha: no item has two coded values");
    r.alpha = *a;
    r.n_items = c.items;
    r.n_pairable = c.pairable;
    r.ci_low = r.ci_high = r.alpha;
    if (options.resamples == 0 || units.empty()) return r;

    std::vector<std::optional<double>> draws(options.resamples);
    parallel_for(options.resamples, options.workers, [&](std::size_t i) {
        std::seed_seq seq{static_cast<std::uint32_t>(options.seed), static_cast<std::uint32_t>(options.seed >> 32),
                          static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i >> 32)};
        std::mt19937_64 rng(seq);
        std::uniform_int_distribution<std::size_t> pick(0, units.size() - 1);
        Coincidences rc;
        for (std::size_t d = 0; d < units.size(); ++d) add_unit(rc, units[pick(rng)]);
        draws[i] = alpha_of(rc);
    });
    std::vector<double> sample;
    for (const auto& d : draws) {
        if (d)
            sample.push_back(*d);
        else
            ++r.failed_resamples;
    }
    if (!sample.empty()) {
        r.ci_low = quantile(sample, 0.025);
        r.ci_high = quantile(sample, 0.975);
    }
    return r;
}

nlohmann::json AgreementResult::to_json() const {
    return {{"alpha", alpha},       {"ci_low", ci_low},         {"ci_high", ci_high},
            {"n_items", n_items},   {"n_coders", n_coders},     {"n_pairable", n_pairable},
            {"level", level},       {"failed_resamples", failed_resamples}};
}

double AgreementReport::disagreement_fraction() const {
    return double_annotated == 0 ? 0.0 : static_cast<double>(disagreements) / static_cast<double>(double_annotated);
}

AgreementReport summarize_agreement(std::span<const eval::IdentificationRun> runs,
                                    std::span<const eval::HumanLabel> labels, const AlphaOptions& options, int k) {
    AgreementReport rep;
    rep.comparison = eval::compare_metrics(runs, labels, k);  // also checks every item has a run

    std::map<std::pair<std::string, std::string>, const eval::IdentificationRun*> by_key;
    for (const auto& r : runs) by_key[{r.pair_id, r.identification_model_id}] = &r;

    const auto items = eval::group_labels(labels);
    std::set<std::string> annotator_set;
    for (const auto& l : labels) annotator_set.insert(l.annotator_id);
    const std::vector<std::string> annotators(annotator_set.begin(), annotator_set.end());

    std::vector<Unit> human, automated;
    std::map<std::string, InsertionAgreement> by_ins;
    std::map<std::string, std::set<std::string>> papers;
    for (const auto& item : items) {
        Unit u(annotators.size());
        for (const auto& [who, value] : item.labels) {
            const auto col = static_cast<std::size_t>(
                std::lower_bound(annotators.begin(), annotators.end(), who) - annotators.begin());
            u[col] = value ? 1 : 0;
        }
        human.push_back(std::move(u));
        const auto& run = *by_key.at({item.pair_id, item.identification_model_id});
        const auto agreed = item.agreed();
        if (agreed) automated.push_back({*agreed ? 1L : 0L, eval::identified_by(run, eval::Metric::either, k) ? 1L : 0L});
        if (item.labels.size() < 2) continue;

        ++rep.double_annotated;
        auto& g = by_ins[run.insertion_model_id];
        g.insertion_model_id = run.insertion_model_id;
        papers[run.insertion_model_id].insert(item.pair_id);
        ++g.items;
        if (!agreed) {
            ++g.disagreements;
            ++rep.disagreements;
        } else if (*agreed) {
            ++g.agreed_identified;
        } else {
            ++g.agreed_not_identified;
        }
    }
    for (auto& [ins, g] : by_ins) {
        g.papers = papers[ins].size();
        rep.by_insertion.push_back(g);
    }
    rep.human_human = krippendorff_alpha(human, options);
    if (!automated.empty()) rep.auto_human = krippendorff_alpha(automated, options);
    return rep;
}

std::string AgreementReport::to_text() const {
    std::string out;
    out += fmt::format("Human-human alpha: {:.4f} [{:.4f}, {:.4f}] over {} items, {} coders\n", human_human.alpha,
                       human_human.ci_low, human_human.ci_high, human_human.n_items, human_human.n_coders);
    out += fmt::format("Automated-human alpha: {:.4f} [{:.4f}, {:.4f}] over {} agreed items\n", auto_human.alpha,
                       auto_human.ci_low, auto_human.ci_high, auto_human.n_items);
    out += fmt::format("Annotator disagreements: {} of {} ({:.0f}%)\n\n", disagreements, double_annotated,
                       100 * disagreement_fraction());
    out += "Agreement by insertion model\n";
    out += "insertion_model,papers,items,agreed_identified,agreed_not_identified,disagreements\n";
    for (const auto& g : by_insertion)
        out += fmt::format("{},{},{},{},{},{}\n", g.insertion_model_id, g.papers, g.items, g.agreed_identified,
                           g.agreed_not_identified, g.disagreements);
    out += "\n";
    out += comparison.either.to_text("Automated metric (judge or Levenshtein) vs agreed human labels");
    out += "\n";
    out += comparison.lev.to_text("Levenshtein only vs agreed human labels");
    out += "\n";
    out += comparison.judge.to_text("Judge only vs agreed human labels");
    return out;
}

nlohmann::json AgreementReport::to_json() const {
    nlohmann::json groups = nlohmann::json::array();
    for (const auto& g : by_insertion)
        groups.push_back({{"insertion_model_id", g.insertion_model_id},
                          {"papers", g.papers},
                          {"items", g.items},
                          {"agreed_identified", g.agreed_identified},
                          {"agreed_not_identified", g.agreed_not_identified},
                          {"disagreements", g.disagreements}});
    return {{"human_human", human_human.to_json()},
            {"auto_human", auto_human.to_json()},
            {"double_annotated", double_annotated},
            {"disagreements", disagreements},
            {"by_insertion_model", groups},
            {"either", comparison.either.to_json()},
            {"lev", comparison.lev.to_json()},
            {"judge", comparison.judge.to_json()}};
}

}  // namespace forge::stats
