#include "ssgk/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <set>
#include <sstream>

#include "ssgk/baselines.hpp"
#include "ssgk/error.hpp"
#include "ssgk/rng.hpp"
#include "ssgk/text_io.hpp"

namespace ssgk {

namespace {

std::vector<std::string_view> split_commas(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = s.find(',', start);
        out.push_back(text::trim(s.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::optional<int> parse_power(std::string_view item) {
    if (item.size() < 3 || item.substr(0, 2) != "2^") return std::nullopt;
    const auto e = text::parse_int(item.substr(2));
    if (!e || *e < -1074 || *e > 1023) return std::nullopt;
    return static_cast<int>(*e);
}

std::string fmt_value(double v) { return text::format_double(v); }

struct CellResult {
    double val_accuracy = 0.0;
    std::size_t nonconverged = 0;
};

// Mean fold accuracy for one (Gram, C) cell.
CellResult cross_validate(const GramMatrix& g, std::span<const std::string> labels,
                          std::span<const std::size_t> folds, std::size_t k, const SvmConfig& svm) {
    CellResult out;
    double sum = 0.0;
    for (std::size_t f = 0; f < k; ++f) {
        std::vector<std::size_t> tr;
        std::vector<std::size_t> va;
        for (std::size_t i = 0; i < folds.size(); ++i) (folds[i] == f ? va : tr).push_back(i);
        std::vector<std::string> tr_labels;
        std::vector<std::string> va_labels;
        for (auto i : tr) tr_labels.push_back(labels[i]);
        for (auto i : va) va_labels.push_back(labels[i]);
        const MulticlassModel m = train_multiclass(g.subset(tr), tr_labels, svm);
        for (const auto& pm : m.pairwise) out.nonconverged += !pm.model.converged;
        const auto pred = predict(m, g.block(va, tr));
        sum += accuracy(pred, va_labels);
    }
    out.val_accuracy = sum / static_cast<double>(k);
    return out;
}

void check_psd_once(const GramMatrix& g, const std::string& what) {
    const PsdReport r = psd_report(g, 1e-8);
    if (!r.is_psd) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s Gram is not PSD (min eigenvalue %.3e)", what.c_str(),
                      r.min_eig);
        warn(buf);
    }
}

}  // namespace

Method method_from_name(std::string_view name) {
    if (name == "ssgk") return Method::ssgk;
    if (name == "edge") return Method::edge;
    if (name == "cc") return Method::cc;
    fail_usage("unknown method '" + std::string(name) + "'; expected ssgk, edge or cc");
}

std::string_view method_name(Method m) {
    switch (m) {
        case Method::ssgk: return "ssgk";
        case Method::edge: return "edge";
        case Method::cc: return "cc";
    }
    return "?";
}

std::vector<double> power_of_two_range(int lo, int hi) {
    std::vector<double> out;
    for (int e = lo; e <= hi; ++e) out.push_back(std::ldexp(1.0, e));
    return out;
}

void GridSpec::validate() const {
    if (c_values.empty() || gamma_values.empty() || r_values.empty() || lambda_values.empty())
        fail_usage("empty grid");
    for (double v : c_values)
        if (!(v > 0.0) || !std::isfinite(v)) fail_usage("C grid values must be positive");
    for (double v : gamma_values)
        if (!(v > 0.0) || !std::isfinite(v)) fail_usage("gamma grid values must be positive");
    for (auto r : r_values)
        if (r < 1) fail_usage("rank grid values must be >= 1");
    for (double v : lambda_values)
        if (!(v >= 0.0) || !std::isfinite(v)) fail_usage("lambda grid values must be >= 0");
}

GridSpec GridSpec::normalized() const {
    auto sorted = [](auto v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        return v;
    };
    GridSpec g;
    g.c_values = sorted(c_values);
    g.gamma_values = sorted(gamma_values);
    g.r_values = sorted(r_values);
    g.lambda_values = sorted(lambda_values);
    return g;
}

std::vector<double> parse_real_grid(std::string_view s) {
    std::vector<double> out;
    for (auto item : split_commas(s)) {
        if (item.empty()) fail_usage("empty item in grid '" + std::string(s) + "'");
        if (const auto dots = item.find(".."); dots != std::string_view::npos &&
                                               item.substr(0, 2) == "2^") {
            const auto lo = parse_power(text::trim(item.substr(0, dots)));
            const auto hi = parse_power(text::trim(item.substr(dots + 2)));
            if (!lo || !hi || *lo > *hi)
                fail_usage("malformed range '" + std::string(item) + "'; expected 2^a..2^b");
            const auto r = power_of_two_range(*lo, *hi);
            out.insert(out.end(), r.begin(), r.end());
        } else if (const auto p = parse_power(item)) {
            out.push_back(std::ldexp(1.0, *p));
        } else if (const auto v = text::parse_double(item)) {
            out.push_back(*v);
        } else {
            fail_usage("malformed grid value '" + std::string(item) + "'");
        }
    }
    return out;
}

std::vector<std::size_t> parse_rank_grid(std::string_view s) {
    std::vector<std::size_t> out;
    for (auto item : split_commas(s)) {
        if (const auto dots = item.find(".."); dots != std::string_view::npos) {
            const auto lo = text::parse_int(text::trim(item.substr(0, dots)));
            const auto hi = text::parse_int(text::trim(item.substr(dots + 2)));
            if (!lo || !hi || *lo < 1 || *lo > *hi)
                fail_usage("malformed rank range '" + std::string(item) + "'");
            for (long long r = *lo; r <= *hi; ++r) out.push_back(static_cast<std::size_t>(r));
        } else if (const auto v = text::parse_int(item); v && *v >= 1) {
            out.push_back(static_cast<std::size_t>(*v));
        } else {
            fail_usage("malformed rank '" + std::string(item) + "'");
        }
    }
    return out;
}

std::vector<std::size_t> stratified_folds(std::span<const std::string> labels, std::size_t k,
                                          std::uint64_t seed) {
    if (k < 2) fail_usage("need at least 2 folds");
    std::map<std::string, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
    Rng rng(seed);
    std::vector<std::size_t> fold(labels.size(), 0);
    for (auto& [label, idx] : by_class) {
        if (idx.size() < k)
            fail_data("class '" + label + "' has " + std::to_string(idx.size()) +
                      " training samples, fewer than " + std::to_string(k) + " folds");
        rng.shuffle(idx);
        for (std::size_t p = 0; p < idx.size(); ++p) fold[idx[p]] = p % k;
    }
    return fold;
}

Vector baseline_features(const SymmetricMatrix& x, Method m, bool cc_mean) {
    switch (m) {
        case Method::edge: return edge_features(x);
        case Method::cc:
            return cc_mean ? Vector{mean_clustering_coefficient(x)} : clustering_coefficients(x);
        case Method::ssgk: break;
    }
    fail_usage("baseline_features: ssgk is not a baseline method");
}

GridSearchOutcome grid_search(const LabeledSamples& train, const LabeledSamples* test,
                              const GridSearchConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    cfg.grid.validate();
    const GridSpec grid = cfg.grid.normalized();
    if (train.size() == 0) fail_data("empty training set");
    if (train.labels.size() != train.size()) fail_data("training labels misaligned");

    const std::vector<std::size_t> folds = stratified_folds(train.labels, cfg.folds, cfg.seed);

    SvmConfig svm = cfg.svm;
    svm.check_psd = false;

    GridSearchOutcome out;
    ExperimentReport& rep = out.report;
    rep.method = cfg.method;
    rep.folds = cfg.folds;
    rep.seed = cfg.seed;
    rep.train_size = train.size();
    rep.test_size = test ? test->size() : 0;

    const bool is_ssgk = cfg.method == Method::ssgk;
    const std::vector<std::size_t> ranks = is_ssgk ? grid.r_values : std::vector<std::size_t>{0};
    const std::vector<double> lambdas = is_ssgk ? grid.lambda_values : std::vector<double>{0.0};

    std::vector<Vector> train_features;
    if (!is_ssgk)
        for (const auto& x : train.matrices)
            train_features.push_back(baseline_features(x, cfg.method, cfg.cc_mean));

    auto factor_cfg = [&](std::size_t rank, double lambda) {
        FactorizationConfig fc = cfg.factorization;
        fc.rank = rank;
        fc.lambda = lambda;
        return fc;
    };
    auto factor_sets = [](const std::vector<FactorizationResult>& rs) {
        std::vector<FactorSet> fsets;
        for (const auto& r : rs) fsets.push_back(r.factors);
        return fsets;
    };

    const std::size_t cells = grid.gamma_values.size() * grid.c_values.size();
    for (auto rank : ranks) {
        for (double lambda : lambdas) {
            std::vector<FactorSet> fsets;
            if (is_ssgk) {
                const auto results = factorize_all(train.matrices, factor_cfg(rank, lambda));
                for (const auto& r : results) rep.nonconverged_factorizations += !r.converged;
                fsets = factor_sets(results);
            }
            std::vector<GramMatrix> grams;
            for (double gamma : grid.gamma_values) {
                grams.push_back(is_ssgk ? build_gram(fsets, {gamma}, cfg.gram)
                                        : vector_gram(train_features, {gamma}));
            }

            std::vector<CellResult> results(cells);
            std::vector<std::exception_ptr> errors(cells);
            const auto count = static_cast<std::ptrdiff_t>(cells);
#pragma omp parallel for schedule(dynamic)
            for (std::ptrdiff_t cell = 0; cell < count; ++cell) {
                const std::size_t gi = static_cast<std::size_t>(cell) / grid.c_values.size();
                const std::size_t ci = static_cast<std::size_t>(cell) % grid.c_values.size();
                SvmConfig local = svm;
                local.c = grid.c_values[ci];
                try {
                    results[cell] = cross_validate(grams[gi], train.labels, folds, cfg.folds, local);
                } catch (...) {
                    errors[cell] = std::current_exception();
                }
            }
            for (const auto& e : errors)
                if (e) std::rethrow_exception(e);

            for (std::size_t cell = 0; cell < cells; ++cell) {
                const std::size_t gi = cell / grid.c_values.size();
                const std::size_t ci = cell % grid.c_values.size();
                rep.rows.push_back(
                    {rank, lambda, grid.gamma_values[gi], grid.c_values[ci], results[cell].val_accuracy});
                rep.nonconverged_svms += results[cell].nonconverged;
            }
        }
    }

    // Rows are already in (R, lambda, gamma, C) ascending order, so the first
    // strict maximum implements the tie-break chain.
    for (std::size_t i = 1; i < rep.rows.size(); ++i)
        if (rep.rows[i].val_accuracy > rep.rows[rep.best].val_accuracy) rep.best = i;
    const GridRow best = rep.best_row();

    const RbfParams kp{best.gamma};
    SvmConfig final_svm = cfg.svm;
    final_svm.c = best.c;
    out.metadata = {best.c, best.gamma, best.rank, best.lambda};

    std::vector<Vector> test_features;
    if (is_ssgk) {
        out.train_factors = factor_sets(factorize_all(train.matrices, factor_cfg(best.rank, best.lambda)));
        out.train_gram = build_gram(out.train_factors, kp, cfg.gram);
    } else {
        out.train_gram = vector_gram(train_features, kp);
    }
    out.train_gram.row_ids = train.ids;
    check_psd_once(out.train_gram, "training");
    out.model = train_multiclass(out.train_gram, train.labels, final_svm);

    if (test && test->size() > 0) {
        if (is_ssgk) {
            const auto results = factorize_all(test->matrices, factor_cfg(best.rank, best.lambda));
            for (const auto& r : results) rep.nonconverged_factorizations += !r.converged;
            out.test_factors = factor_sets(results);
            out.test_cross = build_cross_gram(out.test_factors, out.train_factors, kp, cfg.gram);
        } else {
            for (const auto& x : test->matrices)
                test_features.push_back(baseline_features(x, cfg.method, cfg.cc_mean));
            out.test_cross = vector_cross_gram(test_features, train_features, kp);
        }
        out.test_predictions = predict(out.model, out.test_cross);
        if (test->labels.size() == test->size()) {
            const bool labeled = std::all_of(test->labels.begin(), test->labels.end(),
                                             [](const std::string& l) { return !l.empty(); });
            if (labeled) rep.test_accuracy = accuracy(out.test_predictions, test->labels);
        }
    }

    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

std::string format_report(const ExperimentReport& r) {
    std::ostringstream os;
    const bool ssgk = r.method == Method::ssgk;
    os << "method: " << method_name(r.method) << '\n';
    os << "train samples: " << r.train_size << "  test samples: " << r.test_size
       << "  folds: " << r.folds << "  seed: " << r.seed << '\n';
    os << "configurations: " << r.rows.size() << '\n';
    if (ssgk) os << "non-converged factorizations: " << r.nonconverged_factorizations << '\n';
    os << "non-converged SVM solves: " << r.nonconverged_svms << '\n';
    os << '\n';

    char buf[160];
    std::snprintf(buf, sizeof buf, "%4s  %12s  %12s  %12s  %8s\n", "R", "lambda", "gamma", "C",
                  "val_acc");
    os << buf;
    for (const auto& row : r.rows) {
        std::snprintf(buf, sizeof buf, "%4s  %12s  %12s  %12s  %8s\n",
                      ssgk ? std::to_string(row.rank).c_str() : "-",
                      ssgk ? fmt_value(row.lambda).c_str() : "-", fmt_value(row.gamma).c_str(),
                      fmt_value(row.c).c_str(), format_accuracy(row.val_accuracy).c_str());
        os << buf;
    }
    const GridRow& b = r.best_row();
    os << '\n' << "best: ";
    if (ssgk) os << "R=" << b.rank << " lambda=" << fmt_value(b.lambda) << ' ';
    os << "gamma=" << fmt_value(b.gamma) << " C=" << fmt_value(b.c)
       << " val_acc=" << format_accuracy(b.val_accuracy) << '\n';
    if (r.test_accuracy) os << "test accuracy: " << format_accuracy(*r.test_accuracy) << '\n';
    return os.str();
}

std::string report_csv(const ExperimentReport& r) {
    std::ostringstream os;
    os << "method,R,lambda,gamma,C,val_accuracy,best\n";
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        const auto& row = r.rows[i];
        os << method_name(r.method) << ',' << row.rank << ',' << fmt_value(row.lambda) << ','
           << fmt_value(row.gamma) << ',' << fmt_value(row.c) << ','
           << format_accuracy(row.val_accuracy) << ',' << (i == r.best ? 1 : 0) << '\n';
    }
    return os.str();
}

}  // namespace ssgk
