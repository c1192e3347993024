#include "ssgk/svm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>

#include "ssgk/error.hpp"
#include "ssgk/rng.hpp"
#include "ssgk/text_io.hpp"

namespace ssgk {

namespace {

constexpr double kTau = 1e-12;
constexpr double kSupportEps = 1e-12;

bool in_up(int y, double a, double c) { return (y > 0 && a < c) || (y < 0 && a > 0.0); }
bool in_low(int y, double a, double c) { return (y > 0 && a > 0.0) || (y < 0 && a < c); }

}  // namespace

void SvmConfig::validate() const {
    if (!(c > 0.0) || !std::isfinite(c)) fail_usage("SVM C must be finite and > 0");
    if (!(kkt_tol > 0.0)) fail_usage("SVM kkt_tol must be > 0");
    if (max_iters < 1) fail_usage("SVM max_iters must be >= 1");
}

BinaryModel train_binary(const GramMatrix& g, std::span<const int> y, const SvmConfig& cfg) {
    cfg.validate();
    const std::size_t n = g.size();
    if (g.values.cols() != n) fail_data("train_binary: Gram matrix is not square");
    if (y.size() != n)
        fail_data("train_binary: " + std::to_string(y.size()) + " labels for " +
                  std::to_string(n) + " Gram rows");
    bool has_pos = false;
    bool has_neg = false;
    for (int v : y) {
        if (v == 1)
            has_pos = true;
        else if (v == -1)
            has_neg = true;
        else
            fail_data("train_binary: labels must be +1 or -1");
    }
    if (!has_pos || !has_neg) fail_data("train_binary: single-class input");
    for (double v : g.values.values())
        if (!std::isfinite(v)) fail_data("train_binary: non-finite Gram entry");
    if (cfg.check_psd) {
        const PsdReport r = psd_report(g, 1e-8);
        if (!r.is_psd) {
            char buf[128];
            std::snprintf(buf, sizeof buf, "Gram matrix is not PSD (min eigenvalue %.3e)",
                          r.min_eig);
            warn(buf);
        }
    }

    const double c = cfg.c;
    auto q = [&](std::size_t i, std::size_t j) { return y[i] * y[j] * g(i, j); };

    std::vector<double> alpha(n, 0.0);
    std::vector<double> grad(n, -1.0);  // Q alpha - e
    Rng rng(cfg.seed);

    BinaryModel m;
    std::size_t stalled = 0;
    std::size_t it = 0;
    for (; it < cfg.max_iters; ++it) {
        // Maximal violating pair.
        double gmax = -std::numeric_limits<double>::infinity();
        double gmin = std::numeric_limits<double>::infinity();
        std::size_t i = n;
        std::size_t j = n;
        for (std::size_t t = 0; t < n; ++t) {
            const double v = -y[t] * grad[t];
            if (in_up(y[t], alpha[t], c) && v > gmax) {
                gmax = v;
                i = t;
            }
            if (in_low(y[t], alpha[t], c) && v < gmin) {
                gmin = v;
                j = t;
            }
        }
        if (i == n || j == n || gmax - gmin < cfg.kkt_tol) {
            m.converged = true;
            break;
        }
        if (stalled > 0) {
            // Seeded random second choice among the multipliers violating with i.
            std::vector<std::size_t> cands;
            for (std::size_t t = 0; t < n; ++t)
                if (t != i && in_low(y[t], alpha[t], c) && -y[t] * grad[t] < gmax - cfg.kkt_tol)
                    cands.push_back(t);
            if (!cands.empty()) j = cands[rng.index(cands.size())];
        }

        const double old_i = alpha[i];
        const double old_j = alpha[j];
        if (y[i] != y[j]) {
            double quad = q(i, i) + q(j, j) + 2.0 * q(i, j);
            if (quad <= 0.0) quad = kTau;
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0.0) {
                if (alpha[j] < 0.0) {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if (diff > 0.0) {
                if (alpha[i] > c) {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if (alpha[j] > c) {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            double quad = q(i, i) + q(j, j) - 2.0 * q(i, j);
            if (quad <= 0.0) quad = kTau;
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > c) {
                if (alpha[i] > c) {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if (alpha[j] < 0.0) {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if (sum > c) {
                if (alpha[j] > c) {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        const double di = alpha[i] - old_i;
        const double dj = alpha[j] - old_j;
        if (di == 0.0 && dj == 0.0) {
            if (++stalled >= cfg.max_passes) break;
            continue;
        }
        stalled = 0;
        for (std::size_t t = 0; t < n; ++t) grad[t] += q(t, i) * di + q(t, j) * dj;
    }
    m.iterations = it;

    // rho = mean of y_t grad_t over free multipliers; bias = -rho.
    double ub = std::numeric_limits<double>::infinity();
    double lb = -std::numeric_limits<double>::infinity();
    double free_sum = 0.0;
    std::size_t free_count = 0;
    for (std::size_t t = 0; t < n; ++t) {
        const double yg = y[t] * grad[t];
        if (alpha[t] >= c) {
            if (y[t] < 0)
                ub = std::min(ub, yg);
            else
                lb = std::max(lb, yg);
        } else if (alpha[t] <= 0.0) {
            if (y[t] > 0)
                ub = std::min(ub, yg);
            else
                lb = std::max(lb, yg);
        } else {
            free_sum += yg;
            ++free_count;
        }
    }
    double rho = 0.0;
    if (free_count > 0)
        rho = free_sum / static_cast<double>(free_count);
    else if (std::isfinite(ub) && std::isfinite(lb))
        rho = 0.5 * (ub + lb);
    else
        rho = std::isfinite(ub) ? ub : lb;

    m.alphas = std::move(alpha);
    m.labels.assign(y.begin(), y.end());
    m.bias = -rho;
    m.c = c;
    for (std::size_t t = 0; t < n; ++t)
        if (m.alphas[t] > kSupportEps) m.support_indices.push_back(t);
    return m;
}

double dual_objective(const GramMatrix& g, const BinaryModel& m) {
    const std::size_t n = m.size();
    if (g.size() != n) fail_data("dual_objective: size mismatch");
    double lin = 0.0;
    double quad = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        lin += m.alphas[i];
        if (m.alphas[i] == 0.0) continue;
        for (std::size_t j = 0; j < n; ++j)
            quad += m.alphas[i] * m.alphas[j] * m.labels[i] * m.labels[j] * g(i, j);
    }
    return lin - 0.5 * quad;
}

double decision(const BinaryModel& m, std::span<const double> kernel_row) {
    if (kernel_row.size() != m.size())
        fail_data("decision: kernel row has " + std::to_string(kernel_row.size()) +
                  " entries, model has " + std::to_string(m.size()) + " training samples");
    double s = m.bias;
    for (std::size_t i = 0; i < m.size(); ++i)
        if (m.alphas[i] != 0.0) s += m.alphas[i] * m.labels[i] * kernel_row[i];
    return s;
}

MulticlassModel train_multiclass(const GramMatrix& g, std::span<const std::string> labels,
                                 const SvmConfig& cfg) {
    cfg.validate();
    if (labels.size() != g.size())
        fail_data("train_multiclass: " + std::to_string(labels.size()) + " labels for " +
                  std::to_string(g.size()) + " Gram rows");
    MulticlassModel mc;
    mc.train_size = g.size();
    {
        const std::set<std::string> distinct(labels.begin(), labels.end());
        mc.classes.assign(distinct.begin(), distinct.end());
    }
    if (mc.classes.size() < 2) fail_data("train_multiclass: fewer than 2 classes");

    std::map<std::string, std::size_t> class_index;
    for (std::size_t k = 0; k < mc.classes.size(); ++k) class_index[mc.classes[k]] = k;
    std::vector<std::size_t> label_idx(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) label_idx[i] = class_index[labels[i]];

    for (std::size_t a = 0; a < mc.classes.size(); ++a) {
        for (std::size_t b = a + 1; b < mc.classes.size(); ++b) {
            PairwiseModel pm;
            pm.positive_class = a;
            pm.negative_class = b;
            for (std::size_t i = 0; i < labels.size(); ++i)
                if (label_idx[i] == a || label_idx[i] == b) pm.train_indices.push_back(i);
            mc.pairwise.push_back(std::move(pm));
        }
    }

    std::vector<std::exception_ptr> errors(mc.pairwise.size());
    const auto count = static_cast<std::ptrdiff_t>(mc.pairwise.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t k = 0; k < count; ++k) {
        PairwiseModel& pm = mc.pairwise[k];
        try {
            std::vector<int> y;
            y.reserve(pm.train_indices.size());
            for (auto i : pm.train_indices) y.push_back(label_idx[i] == pm.positive_class ? 1 : -1);
            pm.model = train_binary(g.subset(pm.train_indices), y, cfg);
        } catch (...) {
            errors[k] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return mc;
}

std::vector<std::string> predict(const MulticlassModel& m, const DenseMatrix& cross) {
    if (cross.cols() != m.train_size)
        fail_data("predict: kernel block has " + std::to_string(cross.cols()) +
                  " columns, model was trained on " + std::to_string(m.train_size) + " samples");
    const std::size_t k = m.classes.size();
    std::vector<std::string> out(cross.rows());
    std::vector<double> row;
    for (std::size_t t = 0; t < cross.rows(); ++t) {
        std::vector<std::size_t> votes(k, 0);
        std::vector<double> margin(k, 0.0);
        for (const auto& pm : m.pairwise) {
            row.resize(pm.train_indices.size());
            for (std::size_t i = 0; i < row.size(); ++i) row[i] = cross(t, pm.train_indices[i]);
            const double d = decision(pm.model, row);
            const std::size_t winner = classify(d) > 0 ? pm.positive_class : pm.negative_class;
            ++votes[winner];
            margin[winner] += std::abs(d);
        }
        std::size_t best = 0;
        for (std::size_t c = 1; c < k; ++c) {
            if (votes[c] > votes[best] || (votes[c] == votes[best] && margin[c] > margin[best]))
                best = c;
        }
        out[t] = m.classes[best];
    }
    return out;
}

double accuracy(std::span<const std::string> predicted, std::span<const std::string> truth) {
    if (predicted.size() != truth.size())
        fail_data("accuracy: " + std::to_string(predicted.size()) + " predictions for " +
                  std::to_string(truth.size()) + " labels");
    if (predicted.empty()) fail_data("accuracy: empty input");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) correct += predicted[i] == truth[i];
    return 100.0 * static_cast<double>(correct) / static_cast<double>(predicted.size());
}

std::string format_accuracy(double percent) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", percent);
    return buf;
}

void write_model(std::ostream& os, const MulticlassModel& m, const ModelMetadata& meta) {
    using text::format_double;
    for (const auto& c : m.classes)
        if (c.empty() || c.find_first_of(" \t\r\n") != std::string::npos)
            fail_data("class label '" + c + "' cannot be serialized (empty or contains whitespace)");
    os << "ssgk-model 1\n";
    os << "n " << m.train_size << '\n';
    os << "classes " << m.classes.size();
    for (const auto& c : m.classes) os << ' ' << c;
    os << '\n';
    os << "C " << format_double(meta.c) << '\n';
    os << "gamma " << format_double(meta.gamma) << '\n';
    os << "R " << meta.rank << '\n';
    os << "lambda " << format_double(meta.lambda) << '\n';
    os << "pairs " << m.pairwise.size() << '\n';
    for (const auto& pm : m.pairwise) {
        const BinaryModel& b = pm.model;
        os << "pair " << pm.positive_class << ' ' << pm.negative_class << '\n';
        os << "indices " << pm.train_indices.size();
        for (auto i : pm.train_indices) os << ' ' << i;
        os << '\n';
        os << "labels";
        for (int y : b.labels) os << ' ' << y;
        os << '\n';
        os << "alphas";
        for (double a : b.alphas) os << ' ' << format_double(a);
        os << '\n';
        os << "bias " << format_double(b.bias) << '\n';
        os << "model_c " << format_double(b.c) << '\n';
        os << "converged " << (b.converged ? 1 : 0) << ' ' << b.iterations << '\n';
    }
}

namespace {

struct ModelParser {
    text::LineReader r;

    std::vector<std::string_view> expect(std::string& storage, std::string_view key,
                                         std::size_t min_tokens = 2) {
        auto line = r.next();
        if (!line) r.fail_at(r.line_number() + 1, "unexpected end of model, expected '" +
                                                      std::string(key) + "'");
        storage = std::move(*line);
        auto toks = text::split_ws(storage);
        if (toks.empty() || toks[0] != key)
            r.fail("expected '" + std::string(key) + "'");
        if (toks.size() < min_tokens) r.fail("missing value for '" + std::string(key) + "'");
        return toks;
    }
    std::size_t to_size(std::string_view t) {
        const auto v = text::parse_int(t);
        if (!v || *v < 0) r.fail("expected a non-negative integer, got '" + std::string(t) + "'");
        return static_cast<std::size_t>(*v);
    }
    double to_double(std::string_view t) {
        const auto v = text::parse_double(t);
        if (!v) r.fail("expected a number, got '" + std::string(t) + "'");
        return *v;
    }
};

}  // namespace

MulticlassModel read_model(std::istream& is, ModelMetadata* meta, const std::string& source) {
    ModelParser p{text::LineReader(is, source)};
    std::string line;
    auto toks = p.expect(line, "ssgk-model");
    if (toks[1] != "1") p.r.fail("unsupported model version");

    MulticlassModel m;
    ModelMetadata md;
    toks = p.expect(line, "n");
    m.train_size = p.to_size(toks[1]);
    toks = p.expect(line, "classes");
    const std::size_t k = p.to_size(toks[1]);
    if (toks.size() != k + 2) p.r.fail("class count does not match class list");
    for (std::size_t c = 0; c < k; ++c) m.classes.emplace_back(toks[c + 2]);
    md.c = p.to_double(p.expect(line, "C")[1]);
    md.gamma = p.to_double(p.expect(line, "gamma")[1]);
    md.rank = p.to_size(p.expect(line, "R")[1]);
    md.lambda = p.to_double(p.expect(line, "lambda")[1]);
    const std::size_t pairs = p.to_size(p.expect(line, "pairs")[1]);
    if (pairs != k * (k - 1) / 2) p.r.fail("expected K(K-1)/2 pairwise models");

    for (std::size_t q = 0; q < pairs; ++q) {
        PairwiseModel pm;
        toks = p.expect(line, "pair", 3);
        pm.positive_class = p.to_size(toks[1]);
        pm.negative_class = p.to_size(toks[2]);
        if (pm.positive_class >= k || pm.negative_class >= k) p.r.fail("class index out of range");
        toks = p.expect(line, "indices");
        const std::size_t cnt = p.to_size(toks[1]);
        if (toks.size() != cnt + 2) p.r.fail("index count mismatch");
        for (std::size_t i = 0; i < cnt; ++i) {
            pm.train_indices.push_back(p.to_size(toks[i + 2]));
            if (pm.train_indices.back() >= m.train_size) p.r.fail("training index out of range");
        }
        toks = p.expect(line, "labels", 1);
        if (toks.size() != cnt + 1) p.r.fail("label count mismatch");
        for (std::size_t i = 0; i < cnt; ++i) {
            if (toks[i + 1] == "1")
                pm.model.labels.push_back(1);
            else if (toks[i + 1] == "-1")
                pm.model.labels.push_back(-1);
            else
                p.r.fail("labels must be 1 or -1");
        }
        toks = p.expect(line, "alphas", 1);
        if (toks.size() != cnt + 1) p.r.fail("alpha count mismatch");
        for (std::size_t i = 0; i < cnt; ++i) pm.model.alphas.push_back(p.to_double(toks[i + 1]));
        pm.model.bias = p.to_double(p.expect(line, "bias")[1]);
        pm.model.c = p.to_double(p.expect(line, "model_c")[1]);
        toks = p.expect(line, "converged", 3);
        pm.model.converged = toks[1] == "1";
        pm.model.iterations = p.to_size(toks[2]);
        for (std::size_t i = 0; i < cnt; ++i)
            if (pm.model.alphas[i] > kSupportEps) pm.model.support_indices.push_back(i);
        m.pairwise.push_back(std::move(pm));
    }
    if (p.r.next()) p.r.fail("unexpected trailing content");
    if (meta) *meta = md;
    return m;
}

}  // namespace ssgk
