#pragma once

// Sparse symmetric rank-R factorization
//
//   min_A  ||X - A A^T||_F^2 + lambda * sum_r ||a_r||_1,   A = [a_1 ... a_R]
//
// solved by monotone proximal gradient (ISTA with backtracking) from a
// clamped spectral start, plus a few seeded random restarts.

#include <cstdint>
#include <span>
#include <vector>

#include "ssgk/core.hpp"

namespace ssgk {

struct FactorizationConfig {
    std::size_t rank = 1;
    double lambda = 0.0;
    std::size_t max_iters = 2000;
    double rel_tol = 1e-9;
    double backtrack_shrink = 0.5;
    double initial_step = 1.0;
    // Extra ISTA runs from seeded random starts after the spectral one; the
    // lowest final objective wins (the spectral run on ties).
    std::size_t restarts = 12;
    std::uint64_t seed = 0;

    // Throws a usage Error when a field is out of range.
    void validate() const;
};

struct FactorizationResult {
    FactorSet factors;
    std::vector<double> objective_trace;  // [initial, after step 1, ...]
    bool converged = false;
    bool step_underflow = false;
    std::size_t iterations = 0;

    [[nodiscard]] double final_objective() const { return objective_trace.back(); }
};

[[nodiscard]] double objective(const SymmetricMatrix& x, const FactorSet& f, double lambda);
[[nodiscard]] double objective(const SymmetricMatrix& x, const DenseMatrix& a, double lambda);

// ||X - A A^T||_F^2
[[nodiscard]] double smooth_objective(const SymmetricMatrix& x, const DenseMatrix& a);

// d/dA ||X - A A^T||_F^2 = 4 (A A^T - X) A for symmetric X.
[[nodiscard]] DenseMatrix smooth_gradient(const SymmetricMatrix& x, const DenseMatrix& a);

// Elementwise sign(a) * max(|a| - t, 0).
[[nodiscard]] DenseMatrix soft_threshold(const DenseMatrix& a, double t);

// a_r = sqrt(max(lambda_r, 0)) v_r over the R leading eigenpairs, sign-canonical.
[[nodiscard]] FactorSet eigen_init(const SymmetricMatrix& x, std::size_t rank);

// Flip each a_r whose largest-magnitude entry (lowest index on ties) is negative.
[[nodiscard]] FactorSet canonicalize_signs(const FactorSet& f);

[[nodiscard]] FactorizationResult factorize(const SymmetricMatrix& x,
                                            const FactorizationConfig& cfg);

// One factorization per sample. The OpenMP version and the serial reference
// return identical results (each sample is an independent pure call).
[[nodiscard]] std::vector<FactorizationResult> factorize_all(
    std::span<const SymmetricMatrix> samples, const FactorizationConfig& cfg);
[[nodiscard]] std::vector<FactorizationResult> factorize_all_serial(
    std::span<const SymmetricMatrix> samples, const FactorizationConfig& cfg);

}  // namespace ssgk
