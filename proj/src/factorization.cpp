#include "ssgk/factorization.hpp"

#include <algorithm>
#include <exception>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "ssgk/error.hpp"
#include "ssgk/rng.hpp"

namespace ssgk {

namespace {

constexpr double kMinStep = 1e-18;

double l1_norm(const DenseMatrix& a) {
    double s = 0.0;
    for (double v : a.values()) s += std::abs(v);
    return s;
}

void check_dims(const SymmetricMatrix& x, const DenseMatrix& a, const char* who) {
    if (a.rows() != x.dim())
        fail_data(std::string(who) + ": factor rows (" + std::to_string(a.rows()) +
                  ") do not match matrix dim (" + std::to_string(x.dim()) + ")");
}

// A A^T - X
DenseMatrix residual_matrix(const SymmetricMatrix& x, const DenseMatrix& a) {
    const std::size_t n = x.dim();
    const std::size_t r = a.cols();
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < r; ++k) s += a(i, k) * a(j, k);
            s -= x(i, j);
            m(i, j) = s;
            m(j, i) = s;
        }
    }
    return m;
}

}  // namespace

void FactorizationConfig::validate() const {
    if (rank < 1) fail_usage("factorization rank must be >= 1");
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) fail_usage("lambda must be finite and >= 0");
    if (max_iters < 1) fail_usage("max_iters must be >= 1");
    if (!(rel_tol >= 0.0)) fail_usage("rel_tol must be >= 0");
    if (!(backtrack_shrink > 0.0 && backtrack_shrink < 1.0))
        fail_usage("backtrack_shrink must lie in (0, 1)");
    if (!(initial_step > 0.0) || !std::isfinite(initial_step))
        fail_usage("initial_step must be positive");
}

double smooth_objective(const SymmetricMatrix& x, const DenseMatrix& a) {
    check_dims(x, a, "objective");
    const DenseMatrix m = residual_matrix(x, a);
    double s = 0.0;
    for (double v : m.values()) s += v * v;
    return s;
}

double objective(const SymmetricMatrix& x, const DenseMatrix& a, double lambda) {
    if (lambda < 0.0) fail_usage("objective: lambda must be >= 0");
    return smooth_objective(x, a) + lambda * l1_norm(a);
}

double objective(const SymmetricMatrix& x, const FactorSet& f, double lambda) {
    if (x.dim() != f.dim()) fail_data("objective: dimension mismatch");
    return objective(x, f.as_columns(), lambda);
}

DenseMatrix smooth_gradient(const SymmetricMatrix& x, const DenseMatrix& a) {
    check_dims(x, a, "smooth_gradient");
    const std::size_t n = x.dim();
    const std::size_t r = a.cols();
    const DenseMatrix m = residual_matrix(x, a);
    DenseMatrix g(n, r);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < r; ++k) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) s += m(i, j) * a(j, k);
            g(i, k) = 4.0 * s;
        }
    }
    return g;
}

DenseMatrix soft_threshold(const DenseMatrix& a, double t) {
    if (!(t >= 0.0)) fail_usage("soft_threshold: threshold must be >= 0");
    DenseMatrix out = a;
    for (double& v : out.values()) {
        if (v > t)
            v -= t;
        else if (v < -t)
            v += t;
        else
            v = 0.0;
    }
    return out;
}

FactorSet canonicalize_signs(const FactorSet& f) {
    std::vector<Vector> vs = f.components();
    for (auto& v : vs) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < v.size(); ++i)
            if (std::abs(v[i]) > std::abs(v[best])) best = i;
        if (v[best] < 0.0)
            for (double& x : v) x = -x;
        for (double& x : v) x += 0.0;  // -0.0 -> +0.0
    }
    return FactorSet(f.dim(), std::move(vs), true);
}

FactorSet eigen_init(const SymmetricMatrix& x, std::size_t rank) {
    if (rank < 1 || rank > x.dim())
        fail_usage("eigen_init: rank " + std::to_string(rank) + " outside [1, " +
                   std::to_string(x.dim()) + "]");
    const EigenDecomposition eig = symmetric_eig(x);
    std::vector<Vector> vs(rank, Vector(x.dim(), 0.0));
    for (std::size_t r = 0; r < rank; ++r) {
        const double lam = eig.eigenvalues[r];
        if (lam <= 0.0) continue;
        const double scale = std::sqrt(lam);
        for (std::size_t i = 0; i < x.dim(); ++i) vs[r][i] = scale * eig.eigenvectors(i, r);
    }
    return canonicalize_signs(FactorSet(x.dim(), std::move(vs)));
}

namespace {

// Monotone ISTA from the starting point `a`.
FactorizationResult run_ista(const SymmetricMatrix& x, const FactorizationConfig& cfg, DenseMatrix a) {
    double smooth = smooth_objective(x, a);
    double obj = smooth + cfg.lambda * l1_norm(a);

    FactorizationResult res{FactorSet::from_columns(a), {obj}, false, false, 0};
    if (obj == 0.0) {
        res.converged = true;
        res.factors = canonicalize_signs(res.factors);
        return res;
    }

    double step = cfg.initial_step;
    int small_decreases = 0;
    for (std::size_t it = 0; it < cfg.max_iters; ++it) {
        const DenseMatrix g = smooth_gradient(x, a);

        std::optional<DenseMatrix> accepted;
        double cand_smooth = 0.0;
        double cand_obj = 0.0;
        while (step >= kMinStep) {
            DenseMatrix trial = a;
            auto& tv = trial.values();
            for (std::size_t k = 0; k < tv.size(); ++k) tv[k] -= step * g.values()[k];
            trial = soft_threshold(trial, step * cfg.lambda);

            cand_smooth = smooth_objective(x, trial);
            cand_obj = cand_smooth + cfg.lambda * l1_norm(trial);

            double lin = 0.0;
            double dsq = 0.0;
            for (std::size_t k = 0; k < tv.size(); ++k) {
                const double d = trial.values()[k] - a.values()[k];
                lin += g.values()[k] * d;
                dsq += d * d;
            }
            const double bound = smooth + lin + dsq / (2.0 * step);
            const double slack = 1e-15 * std::max(1.0, std::abs(smooth));
            if (std::isfinite(cand_obj) && cand_smooth <= bound + slack && cand_obj <= obj) {
                accepted = std::move(trial);
                break;
            }
            step *= cfg.backtrack_shrink;
        }

        if (!accepted) {
            // No representable step improves the iterate.
            res.step_underflow = true;
            res.converged = res.iterations > 0;
            break;
        }

        const double decrease = obj - cand_obj;
        const double rel = obj > 0.0 ? decrease / obj : 0.0;
        a = std::move(*accepted);
        smooth = cand_smooth;
        obj = cand_obj;
        res.objective_trace.push_back(obj);
        ++res.iterations;

        if (obj == 0.0 || rel < cfg.rel_tol) {
            if (obj == 0.0 || ++small_decreases >= 2) {
                res.converged = true;
                break;
            }
        } else {
            small_decreases = 0;
        }
        step = std::min(step / cfg.backtrack_shrink, cfg.initial_step);
    }

    res.factors = canonicalize_signs(FactorSet::from_columns(a));
    return res;
}

}  // namespace

FactorizationResult factorize(const SymmetricMatrix& x, const FactorizationConfig& cfg) {
    cfg.validate();
    const std::size_t n = x.dim();
    const std::size_t spectral_rank = std::min(cfg.rank, n);

    // Ranks beyond I get zero columns; their gradient is identically zero.
    DenseMatrix a(n, cfg.rank);
    {
        const DenseMatrix init = eigen_init(x, spectral_rank).as_columns();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t r = 0; r < spectral_rank; ++r) a(i, r) = init(i, r);
    }
    FactorizationResult best = run_ista(x, cfg, std::move(a));
    if (best.final_objective() == 0.0 || cfg.restarts == 0) return best;

    // The spectral start inherits every symmetry of X and ISTA preserves it, so
    // it can stall on a symmetric critical point. Seeded Gaussian starts at half
    // the scale where ||A A^T||_F ~ ||X||_F cover the other basins; strict
    // improvement wins.
    Rng rng(cfg.seed);
    const double sigma = 0.5 * std::sqrt(x.frobenius_norm() /
                                         (static_cast<double>(n) * std::sqrt(static_cast<double>(cfg.rank))));
    for (std::size_t s = 0; s < cfg.restarts; ++s) {
        DenseMatrix start(n, cfg.rank);
        for (double& v : start.values()) v = sigma * rng.normal();
        FactorizationResult r = run_ista(x, cfg, std::move(start));
        if (r.final_objective() < best.final_objective()) best = std::move(r);
    }
    return best;
}

std::vector<FactorizationResult> factorize_all_serial(std::span<const SymmetricMatrix> samples,
                                                      const FactorizationConfig& cfg) {
    std::vector<FactorizationResult> out;
    out.reserve(samples.size());
    for (const auto& x : samples) out.push_back(factorize(x, cfg));
    return out;
}

std::vector<FactorizationResult> factorize_all(std::span<const SymmetricMatrix> samples,
                                               const FactorizationConfig& cfg) {
    cfg.validate();
    const auto count = static_cast<std::ptrdiff_t>(samples.size());
    std::vector<std::optional<FactorizationResult>> slots(samples.size());
    std::vector<std::exception_ptr> errors(samples.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        try {
            slots[i] = factorize(samples[i], cfg);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    // Lowest failing index wins so the reported error does not depend on scheduling.
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    std::vector<FactorizationResult> out;
    out.reserve(slots.size());
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

}  // namespace ssgk
