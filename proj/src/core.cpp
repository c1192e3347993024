#include "ssgk/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <numeric>
#include <string>

#include "ssgk/error.hpp"

namespace ssgk {

namespace {
bool g_warnings_enabled = true;
}

void warn(const std::string& msg) {
    if (g_warnings_enabled) std::cerr << "warning: " << msg << '\n';
}

void set_warnings_enabled(bool enabled) { g_warnings_enabled = enabled; }

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), data_(std::move(values)) {
    if (data_.size() != rows * cols) fail_data("DenseMatrix: value count does not match shape");
}

SymmetricMatrix::SymmetricMatrix(std::size_t dim, std::vector<double> values)
    : dim_(dim), data_(std::move(values)) {
    if (dim_ == 0) fail_data("SymmetricMatrix: dimension must be at least 1");
    if (data_.size() != dim_ * dim_)
        fail_data("SymmetricMatrix: expected " + std::to_string(dim_ * dim_) + " values, got " +
                  std::to_string(data_.size()));
    double sq = 0.0;
    for (double v : data_) {
        if (!std::isfinite(v)) fail_data("SymmetricMatrix: non-finite entry");
        sq += v * v;
    }
    for (std::size_t i = 0; i < dim_; ++i) {
        for (std::size_t j = i + 1; j < dim_; ++j) {
            double& a = data_[i * dim_ + j];
            double& b = data_[j * dim_ + i];
            input_asymmetry_ = std::max(input_asymmetry_, std::abs(a - b));
            const double m = 0.5 * (a + b);
            a = m;
            b = m;
        }
    }
    if (input_asymmetry_ > 1e-6 * std::sqrt(sq)) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "input matrix asymmetric (max |x_ij - x_ji| = %.3g, ||X||_F = %.3g); "
                      "symmetrized",
                      input_asymmetry_, std::sqrt(sq));
        warn(buf);
    }
}

SymmetricMatrix SymmetricMatrix::zeros(std::size_t dim) {
    return SymmetricMatrix(dim, std::vector<double>(dim * dim, 0.0));
}

SymmetricMatrix SymmetricMatrix::identity(std::size_t dim) {
    std::vector<double> v(dim * dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) v[i * dim + i] = 1.0;
    return SymmetricMatrix(dim, std::move(v));
}

SymmetricMatrix SymmetricMatrix::diagonal(std::span<const double> diag) {
    const std::size_t n = diag.size();
    std::vector<double> v(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) v[i * n + i] = diag[i];
    return SymmetricMatrix(n, std::move(v));
}

double SymmetricMatrix::frobenius_norm() const {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
}

double SymmetricMatrix::trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) t += data_[i * dim_ + i];
    return t;
}

FactorSet::FactorSet(std::size_t dim, std::vector<Vector> vectors, bool canonical_sign)
    : dim_(dim), vectors_(std::move(vectors)), canonical_sign_(canonical_sign) {
    if (dim_ == 0) fail_data("FactorSet: dimension must be at least 1");
    if (vectors_.empty()) fail_data("FactorSet: rank must be at least 1");
    for (const auto& v : vectors_) {
        if (v.size() != dim_) fail_data("FactorSet: factor vector length does not match dim");
        for (double x : v)
            if (!std::isfinite(x)) fail_data("FactorSet: non-finite factor entry");
    }
}

FactorSet FactorSet::from_columns(const DenseMatrix& a, bool canonical_sign) {
    std::vector<Vector> vs(a.cols(), Vector(a.rows()));
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t r = 0; r < a.cols(); ++r) vs[r][i] = a(i, r);
    return FactorSet(a.rows(), std::move(vs), canonical_sign);
}

DenseMatrix FactorSet::as_columns() const {
    DenseMatrix a(dim_, rank());
    for (std::size_t r = 0; r < rank(); ++r)
        for (std::size_t i = 0; i < dim_; ++i) a(i, r) = vectors_[r][i];
    return a;
}

Vector EigenDecomposition::eigenvector(std::size_t k) const {
    Vector v(eigenvectors.rows());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = eigenvectors(i, k);
    return v;
}

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) fail_data("dot: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

SymmetricMatrix outer_self(std::span<const double> a) {
    const std::size_t n = a.size();
    std::vector<double> v(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) v[i * n + j] = a[i] * a[j];
    return SymmetricMatrix(n, std::move(v));
}

DenseMatrix outer(std::span<const double> a, std::span<const double> b) {
    DenseMatrix m(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) m(i, j) = a[i] * b[j];
    return m;
}

double matrix_inner(const SymmetricMatrix& a, const SymmetricMatrix& b) {
    if (a.dim() != b.dim()) fail_data("matrix_inner: dimension mismatch");
    return dot(a.values(), b.values());
}

double matrix_inner(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) fail_data("matrix_inner: shape mismatch");
    return dot(a.values(), b.values());
}

double rank_one_inner(std::span<const double> a, std::span<const double> b,
                      std::span<const double> u, std::span<const double> v) {
    if (a.size() != u.size() || b.size() != v.size()) fail_data("rank_one_inner: length mismatch");
    return dot(a, u) * dot(b, v);
}

SymmetricMatrix reconstruct(const FactorSet& f) {
    const std::size_t n = f.dim();
    std::vector<double> v(n * n, 0.0);
    for (const auto& a : f.components())
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) v[i * n + j] += a[i] * a[j];
    return SymmetricMatrix(n, std::move(v));
}

double frobenius_residual(const SymmetricMatrix& x, const FactorSet& f) {
    if (x.dim() != f.dim()) fail_data("frobenius_residual: dimension mismatch");
    const SymmetricMatrix m = reconstruct(f);
    double s = 0.0;
    for (std::size_t k = 0; k < x.values().size(); ++k) {
        const double d = x.values()[k] - m.values()[k];
        s += d * d;
    }
    return std::sqrt(s);
}

EigenDecomposition symmetric_eig(const SymmetricMatrix& x, std::size_t max_sweeps) {
    const std::size_t n = x.dim();
    DenseMatrix a(n, n, x.values());
    DenseMatrix v(n, n);
    for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

    const double target = 1e-12 * x.frobenius_norm();
    auto off_norm = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j) s += a(i, j) * a(i, j);
        return std::sqrt(s);
    };

    std::size_t sweep = 0;
    double off = off_norm();
    while (off > target) {
        if (sweep == max_sweeps) {
            char buf[160];
            std::snprintf(buf, sizeof buf,
                          "symmetric_eig: no convergence after %zu sweeps (off-diagonal norm "
                          "%.3e, target %.3e)",
                          max_sweeps, off, target);
            fail_numerical(buf);
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = std::copysign(1.0, theta) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
        ++sweep;
        off = off_norm();
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

    EigenDecomposition out;
    out.sweeps = sweep;
    out.eigenvalues.resize(n);
    out.eigenvectors = DenseMatrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        out.eigenvalues[k] = a(order[k], order[k]);
        for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, k) = v(i, order[k]);
    }
    return out;
}

}  // namespace ssgk
