#pragma once

// Dense symmetric matrices, rank-one factor sets, and a cyclic Jacobi
// eigensolver. Everything here is immutable after construction.

#include <cstddef>
#include <span>
#include <vector>

namespace ssgk {

using Vector = std::vector<double>;

// General dense row-major matrix. Used for I x R factor matrices,
// rectangular cross-kernel blocks and gradient buffers.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    [[nodiscard]] std::span<const double> row(std::size_t i) const {
        return {data_.data() + i * cols_, cols_};
    }
    [[nodiscard]] std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }

    [[nodiscard]] const std::vector<double>& values() const noexcept { return data_; }
    [[nodiscard]] std::vector<double>& values() noexcept { return data_; }

    friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// I x I real symmetric matrix. Construction symmetrizes with (X + X^T)/2, so
// values(i,j) == values(j,i) holds bit-for-bit afterwards.
class SymmetricMatrix {
public:
    // Row-major I*I values. Throws on dim == 0, size mismatch or non-finite
    // entries. Emits a warning when the input asymmetry exceeds 1e-6 * ||X||_F.
    SymmetricMatrix(std::size_t dim, std::vector<double> values);

    static SymmetricMatrix zeros(std::size_t dim);
    static SymmetricMatrix identity(std::size_t dim);
    static SymmetricMatrix diagonal(std::span<const double> diag);

    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * dim_ + j]; }
    [[nodiscard]] const std::vector<double>& values() const noexcept { return data_; }
    [[nodiscard]] std::span<const double> row(std::size_t i) const {
        return {data_.data() + i * dim_, dim_};
    }

    [[nodiscard]] double frobenius_norm() const;
    [[nodiscard]] double trace() const;

    // Largest |x_ij - x_ji| seen in the raw input before symmetrization.
    [[nodiscard]] double input_asymmetry() const noexcept { return input_asymmetry_; }

    friend bool operator==(const SymmetricMatrix& a, const SymmetricMatrix& b) {
        return a.dim_ == b.dim_ && a.data_ == b.data_;
    }

private:
    std::size_t dim_;
    std::vector<double> data_;
    double input_asymmetry_ = 0.0;
};

// R vectors a_r of length I with X ~ sum_r a_r a_r^T.
class FactorSet {
public:
    FactorSet(std::size_t dim, std::vector<Vector> vectors, bool canonical_sign = false);

    // Columns of an I x R matrix become the factor vectors.
    static FactorSet from_columns(const DenseMatrix& a, bool canonical_sign = false);

    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] std::size_t rank() const noexcept { return vectors_.size(); }
    [[nodiscard]] std::span<const double> component(std::size_t r) const { return vectors_[r]; }
    [[nodiscard]] const std::vector<Vector>& components() const noexcept { return vectors_; }
    [[nodiscard]] bool canonical_sign() const noexcept { return canonical_sign_; }

    // I x R matrix with a_r as column r.
    [[nodiscard]] DenseMatrix as_columns() const;

    friend bool operator==(const FactorSet&, const FactorSet&) = default;

private:
    std::size_t dim_;
    std::vector<Vector> vectors_;
    bool canonical_sign_;
};

struct EigenDecomposition {
    Vector eigenvalues;        // descending; ties keep original diagonal order
    DenseMatrix eigenvectors;  // column k pairs with eigenvalues[k]
    std::size_t sweeps = 0;

    [[nodiscard]] Vector eigenvector(std::size_t k) const;
};

[[nodiscard]] double dot(std::span<const double> a, std::span<const double> b);
[[nodiscard]] SymmetricMatrix outer_self(std::span<const double> a);
// Outer product a b^T as a dense matrix (not symmetric in general).
[[nodiscard]] DenseMatrix outer(std::span<const double> a, std::span<const double> b);

[[nodiscard]] double matrix_inner(const SymmetricMatrix& a, const SymmetricMatrix& b);
[[nodiscard]] double matrix_inner(const DenseMatrix& a, const DenseMatrix& b);

// <a (x) b, u (x) v> = <a,u><b,v>
[[nodiscard]] double rank_one_inner(std::span<const double> a, std::span<const double> b,
                                    std::span<const double> u, std::span<const double> v);

[[nodiscard]] SymmetricMatrix reconstruct(const FactorSet& f);
[[nodiscard]] double frobenius_residual(const SymmetricMatrix& x, const FactorSet& f);

// Cyclic Jacobi. Iterates until the off-diagonal Frobenius norm is at most
// 1e-12 * ||X||_F; throws a numerical Error after max_sweeps.
[[nodiscard]] EigenDecomposition symmetric_eig(const SymmetricMatrix& x,
                                               std::size_t max_sweeps = 100);

}  // namespace ssgk
