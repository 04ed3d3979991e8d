#include "forge/stats/logistic.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "forge/common/error.hpp"

namespace forge::stats {

double sigmoid(double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

namespace {

// log(1 + e^x) without overflow.
double log1pexp(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

std::size_t index_of(const std::vector<std::string>& names, const std::string& name) {
    return static_cast<std::size_t>(std::lower_bound(names.begin(), names.end(), name) - names.begin());
}

}  // namespace

CellTable tabulate(std::span<const eval::OutcomeRow> rows, bool exclude_same_model) {
    std::set<std::string> ins, ids;
    for (const auto& r : rows) {
        if (exclude_same_model && r.insertion_model_id == r.identification_model_id) continue;
        ins.insert(r.insertion_model_id);
        ids.insert(r.identification_model_id);
    }
    CellTable t;
    t.insertion_models.assign(ins.begin(), ins.end());
    t.identification_models.assign(ids.begin(), ids.end());
    std::map<std::pair<std::size_t, std::size_t>, CellTable::Cell> cells;
    for (const auto& r : rows) {
        if (exclude_same_model && r.insertion_model_id == r.identification_model_id) continue;
        const auto i = index_of(t.insertion_models, r.insertion_model_id);
        const auto j = index_of(t.identification_models, r.identification_model_id);
        auto& c = cells[{i, j}];
        c.insertion = i;
        c.identification = j;
        ++c.n;
        for (int k = 1; k <= kMaxK; ++k) c.successes[static_cast<std::size_t>(k - 1)] += r.at(k) ? 1 : 0;
    }
    for (auto& [_, c] : cells) t.cells.push_back(c);
    return t;
}

LogisticFit fit_cells(const CellTable& table, int k, const FitOptions& options) {
    if (k < 1 || k > kMaxK) throw ContractError(fmt::format("k = {} outside 1..{}", k, kMaxK));
    const auto kk = static_cast<std::size_t>(k - 1);
    std::size_t total = 0;
    for (const auto& c : table.cells) total += c.n;
    if (total == 0) throw ContractError("no outcomes to fit");

    std::string reference = options.reference_insertion_model.value_or(
        table.insertion_models.empty() ? std::string{} : table.insertion_models.front());
    if (!std::binary_search(table.insertion_models.begin(), table.insertion_models.end(), reference))
        throw LookupError("reference insertion model '" + reference + "' has no outcomes");
    const auto ref = index_of(table.insertion_models, reference);

    // Separation: a model whose outcomes are all 0 or all 1 has an infinite
    // maximum-likelihood coefficient.
    const auto check = [&](const std::string& kind, const std::string& name, std::size_t n, std::size_t y) {
        if (n == 0) throw ConvergenceError(fmt::format("k={}: {} model {} has no outcomes", k, kind, name));
        if (y == 0 || y == n)
            throw ConvergenceError(fmt::format("k={}: separation, {} model {} has all outcomes {} ({} rows)", k, kind,
                                               name, y == 0 ? 0 : 1, n));
    };
    const auto M = table.identification_models.size();
    const auto I = table.insertion_models.size();
    std::vector<std::size_t> n_id(M), y_id(M), n_ins(I), y_ins(I);
    for (const auto& c : table.cells) {
        n_id[c.identification] += c.n;
        y_id[c.identification] += c.successes[kk];
        n_ins[c.insertion] += c.n;
        y_ins[c.insertion] += c.successes[kk];
    }
    for (std::size_t j = 0; j < M; ++j) check("identification", table.identification_models[j], n_id[j], y_id[j]);
    for (std::size_t i = 0; i < I; ++i) check("insertion", table.insertion_models[i], n_ins[i], y_ins[i]);

    // Parameter layout: beta for every identification model, then gamma for
    // every insertion model but the reference.
    std::vector<int> gamma_col(I, -1);
    int P = static_cast<int>(M);
    for (std::size_t i = 0; i < I; ++i)
        if (i != ref) gamma_col[i] = P++;

    const double b0 = options.beta0;
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(P);
    for (std::size_t j = 0; j < M; ++j) {
        const double m = std::clamp(static_cast<double>(y_id[j]) / static_cast<double>(n_id[j]), 1e-3, 1 - 1e-3);
        theta(static_cast<int>(j)) = std::log(m / (1 - m)) - b0;
    }
    const auto eta = [&](const CellTable::Cell& c, const Eigen::VectorXd& th) {
        double f = b0 + th(static_cast<int>(c.identification));
        if (gamma_col[c.insertion] >= 0) f += th(gamma_col[c.insertion]);
        return f;
    };
    const auto loglik = [&](const Eigen::VectorXd& th) {
        double ll = 0.0;
        for (const auto& c : table.cells) {
            if (c.n == 0) continue;
            const double f = eta(c, th);
            ll += static_cast<double>(c.successes[kk]) * f - static_cast<double>(c.n) * log1pexp(f);
        }
        return ll;
    };
    Eigen::VectorXd grad(P);
    Eigen::MatrixXd info(P, P);
    const auto derivatives = [&](const Eigen::VectorXd& th) {
        grad.setZero();
        info.setZero();
        for (const auto& c : table.cells) {
            if (c.n == 0) continue;
            const double p = sigmoid(eta(c, th));
            const double n = static_cast<double>(c.n);
            const double r = static_cast<double>(c.successes[kk]) - n * p;
            const double w = n * p * (1 - p);
            const int a = static_cast<int>(c.identification);
            const int b = gamma_col[c.insertion];
            grad(a) += r;
            info(a, a) += w;
            if (b >= 0) {
                grad(b) += r;
                info(b, b) += w;
                info(a, b) += w;
                info(b, a) += w;
            }
        }
    };

    LogisticFit fit;
    fit.k = k;
    fit.beta0 = b0;
    fit.reference_insertion_model = reference;
    fit.observations = total;

    double ll = loglik(theta);
    bool converged = false;
    int it = 0;
    for (;; ++it) {
        derivatives(theta);
        if (grad.norm() < options.gradient_tolerance) {
            converged = true;
            break;
        }
        if (it >= options.max_iterations) break;
        Eigen::FullPivLU<Eigen::MatrixXd> lu(info);
        if (lu.rank() < P) throw RankError(fmt::format("k={}: information matrix has rank {} < {}", k, lu.rank(), P));
        const Eigen::VectorXd step = lu.solve(grad);
        double t = 1.0;
        Eigen::VectorXd next = theta + step;
        double next_ll = loglik(next);
        for (int h = 0; h < 40 && !(next_ll >= ll - 1e-12 * std::abs(ll)); ++h) {
            t *= 0.5;
            next = theta + t * step;
            next_ll = loglik(next);
        }
        theta = next;
        ll = next_ll;
    }
    if (!converged)
        throw ConvergenceError(fmt::format("k={}: no convergence after {} iterations (gradient norm {:.3g})", k,
                                           options.max_iterations, grad.norm()));

    Eigen::FullPivLU<Eigen::MatrixXd> lu(info);
    if (lu.rank() < P) throw RankError(fmt::format("k={}: information matrix has rank {} < {}", k, lu.rank(), P));
    const Eigen::MatrixXd cov = lu.inverse();

    fit.converged = true;
    fit.loglik = ll;
    fit.gradient_norm = grad.norm();
    fit.iterations = it;
    for (std::size_t j = 0; j < M; ++j) {
        const int a = static_cast<int>(j);
        fit.beta[table.identification_models[j]] = {theta(a), std::sqrt(cov(a, a))};
        fit.parameters.push_back("beta:" + table.identification_models[j]);
    }
    for (std::size_t i = 0; i < I; ++i) {
        const int b = gamma_col[i];
        fit.gamma[table.insertion_models[i]] = b < 0 ? Coef{0.0, 0.0} : Coef{theta(b), std::sqrt(cov(b, b))};
        if (b >= 0) fit.parameters.push_back("gamma:" + table.insertion_models[i]);
    }
    fit.covariance.assign(static_cast<std::size_t>(P) * static_cast<std::size_t>(P), 0.0);
    for (int r = 0; r < P; ++r)
        for (int c = 0; c < P; ++c) fit.covariance[static_cast<std::size_t>(r * P + c)] = cov(r, c);
    return fit;
}

LogisticFit fit_logistic(std::span<const eval::OutcomeRow> rows, int k, const FitOptions& options) {
    return fit_cells(tabulate(rows, options.exclude_same_model), k, options);
}

std::vector<LogisticFit> fit_all(std::span<const eval::OutcomeRow> rows, const FitOptions& options) {
    const auto table = tabulate(rows, options.exclude_same_model);
    std::vector<LogisticFit> fits;
    for (int k = 1; k <= kMaxK; ++k) fits.push_back(fit_cells(table, k, options));
    return fits;
}

double LogisticFit::linear_predictor(const std::string& insertion_model, const std::string& identification_model) const {
    const auto b = beta.find(identification_model);
    if (b == beta.end()) throw LookupError("no coefficient for identification model " + identification_model);
    const auto g = gamma.find(insertion_model);
    if (g == gamma.end()) throw LookupError("no coefficient for insertion model " + insertion_model);
    return beta0 + b->second.value + g->second.value;
}

Prediction predict_accuracy(const LogisticFit& fit, const std::string& insertion_model,
                            const std::string& identification_model, double z) {
    const double f = fit.linear_predictor(insertion_model, identification_model);
    if (!fit.converged && !fit.covariance.empty()) throw ContractError("prediction from a fit that did not converge");
    double var = 0.0;
    const auto P = fit.parameters.size();
    if (!fit.covariance.empty()) {
        std::vector<std::size_t> idx;
        for (std::size_t p = 0; p < P; ++p)
            if (fit.parameters[p] == "beta:" + identification_model || fit.parameters[p] == "gamma:" + insertion_model)
                idx.push_back(p);
        for (auto a : idx)
            for (auto b : idx) var += fit.covariance[a * P + b];
    }
    const double half = z * std::sqrt(std::max(var, 0.0));
    return {sigmoid(f), sigmoid(f - half), sigmoid(f + half)};
}

std::map<std::string, double> aggregate_beta(std::span<const LogisticFit> fits) {
    std::array<const LogisticFit*, kMaxK> by_k{};
    for (const auto& f : fits) {
        if (f.k < 1 || f.k > kMaxK) throw IncompleteInputError(fmt::format("fit for k = {} outside 1..10", f.k));
        auto& slot = by_k[static_cast<std::size_t>(f.k - 1)];
        if (slot) throw IncompleteInputError(fmt::format("two fits for k = {}", f.k));
        slot = &f;
    }
    for (int k = 1; k <= kMaxK; ++k)
        if (!by_k[static_cast<std::size_t>(k - 1)]) throw IncompleteInputError(fmt::format("no fit for k = {}", k));
    std::map<std::string, double> sum;
    for (const auto& [model, _] : by_k[0]->beta) sum[model] = 0.0;
    for (const auto* f : by_k) {
        if (f->beta.size() != sum.size()) throw IncompleteInputError(fmt::format("fit for k = {} covers other models", f->k));
        for (const auto& [model, c] : f->beta) {
            const auto it = sum.find(model);
            if (it == sum.end()) throw IncompleteInputError(fmt::format("fit for k = {} covers other models", f->k));
            it->second += c.value;
        }
    }
    for (auto& [_, v] : sum) v /= kMaxK;
    return sum;
}

}  // namespace forge::stats
