#include "forge/stats/report.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <fmt/format.h>

#include "forge/common/csv.hpp"
#include "forge/common/error.hpp"
#include "forge/common/fs.hpp"

namespace forge::stats {

StatsResult compute_stats(std::span<const eval::OutcomeRow> rows, const StatsOptions& options) {
    if (rows.empty()) throw ContractError("no outcome rows");
    StatsResult r;
    r.accuracy = eval::accuracy_table(rows);
    r.candidates = candidate_count_summary(rows);

    const auto table = tabulate(rows, options.fit.exclude_same_model);
    for (int k = 1; k <= kMaxK; ++k) {
        try {
            r.fits.push_back(fit_cells(table, k, options.fit));
        } catch (const Error& e) {
            r.fit_errors.push_back(e.what());
        }
    }
    if (!r.fit_errors.empty()) return r;
    r.scores = rank_scores(aggregate_beta(r.fits));

    if (options.resamples == 0) return r;
    BootstrapOptions b;
    b.resamples = options.resamples;
    b.seed = options.seed;
    b.workers = options.workers;
    b.fit = options.fit;
    r.resamples = options.resamples;
    try {
        auto boot = bootstrap_beta(rows, b);
        r.failed_resamples = boot.failed;
        r.scores = std::move(boot.scores);
    } catch (const ReliabilityError& e) {
        r.failed_resamples = e.failed();
        r.bootstrap_error = e.what();
    }
    return r;
}

std::string coefficients_csv(std::span<const LogisticFit> fits) {
    std::string out = csv_row({"k", "kind", "model", "coef", "se"});
    for (const auto& f : fits) {
        for (const auto& [model, c] : f.beta)
            out += csv_row({std::to_string(f.k), "beta", model, fmt::format("{:.4f}", c.value), fmt::format("{:.4f}", c.se)});
        for (const auto& [model, c] : f.gamma)
            out += csv_row({std::to_string(f.k), "gamma", model, fmt::format("{:.4f}", c.value), fmt::format("{:.4f}", c.se)});
    }
    return out;
}

std::string scores_csv(std::span<const AggregateScore> scores) {
    std::string out = csv_row({"rank", "identification_model_id", "beta", "ci_low", "ci_high"});
    for (const auto& s : scores)
        out += csv_row({std::to_string(s.rank), s.identification_model, fmt::format("{:.4f}", s.beta),
                        fmt::format("{:.4f}", s.ci_low), fmt::format("{:.4f}", s.ci_high)});
    return out;
}

std::string predictions_csv(std::span<const LogisticFit> fits) {
    std::string out = csv_row({"k", "insertion_model_id", "identification_model_id", "p", "low", "high"});
    for (const auto& f : fits)
        for (const auto& [ins, _] : f.gamma)
            for (const auto& [id, __] : f.beta) {
                const auto p = predict_accuracy(f, ins, id);
                out += csv_row({std::to_string(f.k), ins, id, fmt::format("{:.4f}", p.p), fmt::format("{:.4f}", p.low),
                                fmt::format("{:.4f}", p.high)});
            }
    return out;
}

std::string predicted_accuracy_svg(std::span<const LogisticFit> fits) {
    constexpr double W = 720, H = 440, left = 60, right = 220, top = 40, bottom = 50;
    constexpr std::array<const char*, 8> palette{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                 "#9467bd", "#8c564b", "#e377c2", "#17becf"};
    std::string svg = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
        "font-family=\"sans-serif\" font-size=\"12\">\n<rect width=\"{0}\" height=\"{1}\" fill=\"white\"/>\n",
        W, H);
    if (fits.empty()) return svg + "<text x=\"20\" y=\"30\">no fitted models</text>\n</svg>\n";

    std::vector<const LogisticFit*> sorted;
    for (const auto& f : fits) sorted.push_back(&f);
    std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->k < b->k; });
    const auto& ref = sorted.front()->reference_insertion_model;

    struct Curve {
        std::string model;
        std::vector<std::pair<int, Prediction>> points;
    };
    std::vector<Curve> curves;
    double ymax = 0.1;
    for (const auto& [model, _] : sorted.front()->beta) {
        Curve c{model, {}};
        for (const auto* f : sorted) {
            if (!f->beta.count(model)) continue;
            const auto p = predict_accuracy(*f, ref, model);
            ymax = std::max(ymax, p.high);
            c.points.emplace_back(f->k, p);
        }
        curves.push_back(std::move(c));
    }
    ymax = std::min(1.0, std::ceil(ymax * 10) / 10);
    const double pw = W - left - right, ph = H - top - bottom;
    const auto x = [&](int k) { return left + pw * (k - 1) / (kMaxK - 1); };
    const auto y = [&](double p) { return top + ph * (1 - p / ymax); };

    svg += fmt::format("<text x=\"{}\" y=\"22\" font-size=\"14\">Predicted identification accuracy (insertion: {})</text>\n",
                       left, ref);
    svg += fmt::format("<line x1=\"{0}\" y1=\"{1:.1f}\" x2=\"{2:.1f}\" y2=\"{1:.1f}\" stroke=\"black\"/>\n", left,
                       top + ph, left + pw);
    svg += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2:.1f}\" stroke=\"black\"/>\n", left, top, top + ph);
    for (int k = 1; k <= kMaxK; ++k)
        svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n", x(k), top + ph + 18, k);
    svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">k</text>\n", left + pw / 2, H - 8);
    for (int i = 0; i <= 5; ++i) {
        const double p = ymax * i / 5;
        svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{:.2f}</text>\n", left - 6, y(p) + 4, p);
        svg += fmt::format("<line x1=\"{0}\" y1=\"{1:.1f}\" x2=\"{2:.1f}\" y2=\"{1:.1f}\" stroke=\"#ddd\"/>\n", left, y(p),
                           left + pw);
    }
    for (std::size_t i = 0; i < curves.size(); ++i) {
        const auto* color = palette[i % palette.size()];
        const auto& pts = curves[i].points;
        std::string band, line;
        for (const auto& [k, p] : pts) band += fmt::format("{:.1f},{:.1f} ", x(k), y(p.high));
        for (auto it = pts.rbegin(); it != pts.rend(); ++it)
            band += fmt::format("{:.1f},{:.1f} ", x(it->first), y(it->second.low));
        for (const auto& [k, p] : pts) line += fmt::format("{:.1f},{:.1f} ", x(k), y(p.p));
        if (!band.empty()) band.pop_back();
        if (!line.empty()) line.pop_back();
        svg += fmt::format("<polygon points=\"{}\" fill=\"{}\" fill-opacity=\"0.18\" stroke=\"none\"/>\n", band, color);
        svg += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>\n", line, color);
        const double ly = top + 16 + 20 * static_cast<double>(i);
        svg += fmt::format("<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"14\" height=\"4\" fill=\"{}\"/>\n", W - right + 16,
                           ly - 5, color);
        svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\">{}</text>\n", W - right + 36, ly, curves[i].model);
    }
    return svg + "</svg>\n";
}

std::string summary_text(const StatsResult& r) {
    std::string out;
    out += fmt::format("fits: {} of {} k values\n", r.fits.size(), kMaxK);
    for (const auto& e : r.fit_errors) out += "fit failed: " + e + "\n";
    for (const auto& f : r.fits)
        out += fmt::format("k={}: {} observations, loglik {:.4f}, {} iterations\n", f.k, f.observations, f.loglik,
                           f.iterations);
    if (r.resamples > 0)
        out += fmt::format("bootstrap: {} resamples, {} failed\n", r.resamples, r.failed_resamples);
    if (!r.bootstrap_error.empty()) out += "bootstrap unusable: " + r.bootstrap_error + "\n";
    if (!r.scores.empty()) {
        out += "aggregate beta:\n";
        for (const auto& s : r.scores)
            out += r.resamples > 0 && r.bootstrap_error.empty()
                       ? fmt::format("  {}. {} {:.2f} [{:.2f}, {:.2f}]\n", s.rank, s.identification_model, s.beta,
                                     s.ci_low, s.ci_high)
                       : fmt::format("  {}. {} {:.2f}\n", s.rank, s.identification_model, s.beta);
    }
    out += r.complete() ? "status: complete\n" : "status: partial\n";
    return out;
}

std::vector<std::filesystem::path> write_report_bundle(const std::filesystem::path& dir, const StatsResult& r,
                                                       const std::optional<AgreementReport>& agreement) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;
    const auto put = [&](const std::string& name, const std::string& content) {
        write_file_atomic(dir / name, content);
        written.push_back(dir / name);
    };
    put("table4.csv", eval::accuracy_table_csv(r.accuracy));
    put("table5.csv", coefficients_csv(r.fits));
    put("table6.csv", scores_csv(r.scores));
    put("table7.csv", candidate_counts_csv(r.candidates));
    put("predicted.csv", predictions_csv(r.fits));
    put("fig3.svg", predicted_accuracy_svg(r.fits));
    put("summary.txt", summary_text(r));
    if (agreement) {
        put("agreement.txt", agreement->to_text());
        put("agreement.json", agreement->to_json().dump(2) + "\n");
    }
    return written;
}

}  // namespace forge::stats
