#pragma once

// Structure-preserving symmetric graph kernel over factor sets:
//
//   kappa(X, Y) = sum_p sum_q k(x_p, y_q)^2
//
// where X ~ sum_p x_p x_p^T, Y ~ sum_q y_q y_q^T and k is a base vector
// kernel (Gaussian RBF here). Gram assembly comes in two flavors: an OpenMP
// kernel and a serial reference; both compute each (i, j) pair once with
// the same code path, so their outputs are bit-identical.

#include <algorithm>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ssgk/core.hpp"

namespace ssgk {

namespace detail {
[[noreturn]] void throw_dimension_mismatch(std::size_t a, std::size_t b);
}

struct RbfParams {
    double gamma = 1.0;
    void validate() const;
};

// exp(-gamma * ||x - y||^2)
[[nodiscard]] double rbf(std::span<const double> x, std::span<const double> y, const RbfParams& p);

// Generic form: any base kernel callable k(span, span) -> double.
template <class BaseKernel>
[[nodiscard]] double ssgk_with(const FactorSet& fx, const FactorSet& fy, BaseKernel&& k);

[[nodiscard]] double ssgk(const FactorSet& fx, const FactorSet& fy, const RbfParams& p);

struct GramMatrix {
    DenseMatrix values;                 // n x n
    std::vector<std::string> row_ids;   // optional; empty or size n

    [[nodiscard]] std::size_t size() const noexcept { return values.rows(); }
    double operator()(std::size_t i, std::size_t j) const { return values(i, j); }

    // Principal sub-matrix over the given indices (in order).
    [[nodiscard]] GramMatrix subset(std::span<const std::size_t> idx) const;
    // Rows `rows`, columns `cols` as a rectangular block.
    [[nodiscard]] DenseMatrix block(std::span<const std::size_t> rows,
                                    std::span<const std::size_t> cols) const;
};

struct GramOptions {
    // kappa(X,Y) / sqrt(kappa(X,X) kappa(Y,Y)); off by default.
    bool normalize = false;
};

[[nodiscard]] GramMatrix build_gram(std::span<const FactorSet> factors, const RbfParams& p,
                                    const GramOptions& opts = {});
[[nodiscard]] GramMatrix build_gram_serial(std::span<const FactorSet> factors, const RbfParams& p,
                                           const GramOptions& opts = {});

// M(i, j) = kappa(test_i, train_j)
[[nodiscard]] DenseMatrix build_cross_gram(std::span<const FactorSet> test,
                                           std::span<const FactorSet> train, const RbfParams& p,
                                           const GramOptions& opts = {});
[[nodiscard]] DenseMatrix build_cross_gram_serial(std::span<const FactorSet> test,
                                                  std::span<const FactorSet> train,
                                                  const RbfParams& p, const GramOptions& opts = {});

// Plain RBF Gram over feature vectors (edge / clustering baselines).
[[nodiscard]] GramMatrix vector_gram(std::span<const Vector> features, const RbfParams& p);
[[nodiscard]] GramMatrix vector_gram_serial(std::span<const Vector> features, const RbfParams& p);
[[nodiscard]] DenseMatrix vector_cross_gram(std::span<const Vector> test,
                                            std::span<const Vector> train, const RbfParams& p);

struct PsdReport {
    double min_eig = 0.0;
    double max_eig = 0.0;
    bool is_psd = false;
};

// is_psd <=> min_eig >= -tol * max(1, max_eig)
[[nodiscard]] PsdReport psd_report(const GramMatrix& g, double tol = 1e-8);

// Text format: line 1 `n`, then n rows of n values (17 significant digits).
void write_gram(std::ostream& os, const GramMatrix& g);
[[nodiscard]] GramMatrix read_gram(std::istream& is, const std::string& source = "<gram>");
void save_gram(const GramMatrix& g, const std::string& path);
[[nodiscard]] GramMatrix load_gram(const std::string& path);

// Rectangular kernel blocks: line 1 `m n`, then m rows of n values.
void write_cross_gram(std::ostream& os, const DenseMatrix& m);
[[nodiscard]] DenseMatrix read_cross_gram(std::istream& is, const std::string& source = "<cross>");
void save_cross_gram(const DenseMatrix& m, const std::string& path);
[[nodiscard]] DenseMatrix load_cross_gram(const std::string& path);

template <class BaseKernel>
double ssgk_with(const FactorSet& fx, const FactorSet& fy, BaseKernel&& k) {
    if (fx.dim() != fy.dim()) detail::throw_dimension_mismatch(fx.dim(), fy.dim());
    std::vector<double> terms;
    terms.reserve(fx.rank() * fy.rank());
    for (std::size_t p = 0; p < fx.rank(); ++p) {
        for (std::size_t q = 0; q < fy.rank(); ++q) {
            const double v = k(fx.component(p), fy.component(q));
            terms.push_back(v * v);
        }
    }
    // Sorted summation: swapping the arguments (or permuting components) gives the same bits.
    std::sort(terms.begin(), terms.end());
    double sum = 0.0;
    for (double t : terms) sum += t;
    return sum;
}

}  // namespace ssgk
