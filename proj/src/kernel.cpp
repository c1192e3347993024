#include "ssgk/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>

#include "ssgk/error.hpp"
#include "ssgk/text_io.hpp"

namespace ssgk {

namespace detail {
void throw_dimension_mismatch(std::size_t a, std::size_t b) {
    fail_data("dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
}
}  // namespace detail

namespace {

void check_shared_dim(std::span<const FactorSet> a, std::span<const FactorSet> b) {
    const std::size_t dim = !a.empty() ? a.front().dim() : (!b.empty() ? b.front().dim() : 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].dim() != dim)
            fail_data("sample " + std::to_string(i) + " has dim " + std::to_string(a[i].dim()) +
                      ", expected " + std::to_string(dim));
    for (std::size_t i = 0; i < b.size(); ++i)
        if (b[i].dim() != dim)
            fail_data("sample " + std::to_string(i) + " has dim " + std::to_string(b[i].dim()) +
                      ", expected " + std::to_string(dim));
}

void check_shared_length(std::span<const Vector> a, std::span<const Vector> b) {
    const std::size_t len = !a.empty() ? a.front().size() : (!b.empty() ? b.front().size() : 0);
    for (const auto& v : a)
        if (v.size() != len) fail_data("feature vectors differ in length");
    for (const auto& v : b)
        if (v.size() != len) fail_data("feature vectors differ in length");
}

std::vector<double> self_kernels(std::span<const FactorSet> fs, const RbfParams& p) {
    std::vector<double> d(fs.size());
    for (std::size_t i = 0; i < fs.size(); ++i) d[i] = ssgk(fs[i], fs[i], p);
    return d;
}

// Entry (i, j) of a symmetric kernel matrix. Shared by the serial and OpenMP
// assemblers so both produce identical bits.
template <class Eval>
void fill_upper(DenseMatrix& g, std::size_t i, Eval&& eval) {
    for (std::size_t j = i; j < g.cols(); ++j) {
        const double v = eval(i, j);
        g(i, j) = v;
        g(j, i) = v;
    }
}

template <class Eval>
DenseMatrix symmetric_serial(std::size_t n, Eval&& eval) {
    DenseMatrix g(n, n);
    for (std::size_t i = 0; i < n; ++i) fill_upper(g, i, eval);
    return g;
}

template <class Eval>
DenseMatrix symmetric_parallel(std::size_t n, Eval&& eval) {
    DenseMatrix g(n, n);
    const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < count; ++i) fill_upper(g, static_cast<std::size_t>(i), eval);
    return g;
}

template <class Eval>
DenseMatrix rect_serial(std::size_t m, std::size_t n, Eval&& eval) {
    DenseMatrix g(m, n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) g(i, j) = eval(i, j);
    return g;
}

template <class Eval>
DenseMatrix rect_parallel(std::size_t m, std::size_t n, Eval&& eval) {
    DenseMatrix g(m, n);
    const auto count = static_cast<std::ptrdiff_t>(m);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < count; ++i)
        for (std::size_t j = 0; j < n; ++j) g(i, j) = eval(static_cast<std::size_t>(i), j);
    return g;
}

template <bool Parallel>
GramMatrix gram_impl(std::span<const FactorSet> fs, const RbfParams& p, const GramOptions& o) {
    p.validate();
    check_shared_dim(fs, {});
    const std::vector<double> diag = o.normalize ? self_kernels(fs, p) : std::vector<double>{};
    auto eval = [&](std::size_t i, std::size_t j) {
        const double k = ssgk(fs[i], fs[j], p);
        return o.normalize ? k / std::sqrt(diag[i] * diag[j]) : k;
    };
    GramMatrix g;
    g.values = Parallel ? symmetric_parallel(fs.size(), eval) : symmetric_serial(fs.size(), eval);
    return g;
}

template <bool Parallel>
DenseMatrix cross_impl(std::span<const FactorSet> test, std::span<const FactorSet> train,
                       const RbfParams& p, const GramOptions& o) {
    p.validate();
    check_shared_dim(test, train);
    const std::vector<double> dt = o.normalize ? self_kernels(test, p) : std::vector<double>{};
    const std::vector<double> dr = o.normalize ? self_kernels(train, p) : std::vector<double>{};
    auto eval = [&](std::size_t i, std::size_t j) {
        const double k = ssgk(test[i], train[j], p);
        return o.normalize ? k / std::sqrt(dt[i] * dr[j]) : k;
    };
    return Parallel ? rect_parallel(test.size(), train.size(), eval)
                    : rect_serial(test.size(), train.size(), eval);
}

template <bool Parallel>
GramMatrix vector_gram_impl(std::span<const Vector> fs, const RbfParams& p) {
    p.validate();
    check_shared_length(fs, {});
    auto eval = [&](std::size_t i, std::size_t j) { return rbf(fs[i], fs[j], p); };
    GramMatrix g;
    g.values = Parallel ? symmetric_parallel(fs.size(), eval) : symmetric_serial(fs.size(), eval);
    return g;
}

}  // namespace

void RbfParams::validate() const {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) fail_usage("RBF gamma must be finite and > 0");
}

double rbf(std::span<const double> x, std::span<const double> y, const RbfParams& p) {
    if (x.size() != y.size()) detail::throw_dimension_mismatch(x.size(), y.size());
    double d2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        d2 += d * d;
    }
    return std::exp(-p.gamma * d2);
}

double ssgk(const FactorSet& fx, const FactorSet& fy, const RbfParams& p) {
    return ssgk_with(fx, fy, [&](std::span<const double> a, std::span<const double> b) {
        return rbf(a, b, p);
    });
}

GramMatrix GramMatrix::subset(std::span<const std::size_t> idx) const {
    GramMatrix out;
    out.values = block(idx, idx);
    if (!row_ids.empty())
        for (auto i : idx) out.row_ids.push_back(row_ids[i]);
    return out;
}

DenseMatrix GramMatrix::block(std::span<const std::size_t> rows,
                              std::span<const std::size_t> cols) const {
    DenseMatrix m(rows.size(), cols.size());
    for (std::size_t a = 0; a < rows.size(); ++a)
        for (std::size_t b = 0; b < cols.size(); ++b) m(a, b) = values(rows[a], cols[b]);
    return m;
}

GramMatrix build_gram(std::span<const FactorSet> factors, const RbfParams& p,
                      const GramOptions& opts) {
    return gram_impl<true>(factors, p, opts);
}

GramMatrix build_gram_serial(std::span<const FactorSet> factors, const RbfParams& p,
                             const GramOptions& opts) {
    return gram_impl<false>(factors, p, opts);
}

DenseMatrix build_cross_gram(std::span<const FactorSet> test, std::span<const FactorSet> train,
                             const RbfParams& p, const GramOptions& opts) {
    return cross_impl<true>(test, train, p, opts);
}

DenseMatrix build_cross_gram_serial(std::span<const FactorSet> test,
                                    std::span<const FactorSet> train, const RbfParams& p,
                                    const GramOptions& opts) {
    return cross_impl<false>(test, train, p, opts);
}

GramMatrix vector_gram(std::span<const Vector> features, const RbfParams& p) {
    return vector_gram_impl<true>(features, p);
}

GramMatrix vector_gram_serial(std::span<const Vector> features, const RbfParams& p) {
    return vector_gram_impl<false>(features, p);
}

DenseMatrix vector_cross_gram(std::span<const Vector> test, std::span<const Vector> train,
                              const RbfParams& p) {
    p.validate();
    check_shared_length(test, train);
    return rect_parallel(test.size(), train.size(),
                         [&](std::size_t i, std::size_t j) { return rbf(test[i], train[j], p); });
}

PsdReport psd_report(const GramMatrix& g, double tol) {
    const std::size_t n = g.size();
    if (n == 0) return {0.0, 0.0, true};
    const EigenDecomposition eig = symmetric_eig(SymmetricMatrix(n, g.values.values()));
    PsdReport r;
    r.max_eig = eig.eigenvalues.front();
    r.min_eig = eig.eigenvalues.back();
    r.is_psd = r.min_eig >= -tol * std::max(1.0, r.max_eig);
    return r;
}

void write_gram(std::ostream& os, const GramMatrix& g) {
    const std::size_t n = g.size();
    os << n << '\n';
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (j) os << ' ';
            os << text::format_double(g(i, j));
        }
        os << '\n';
    }
}

GramMatrix read_gram(std::istream& is, const std::string& source) {
    text::LineReader r(is, source);
    const auto header = r.next();
    if (!header) r.fail("empty file, expected header `n`");
    const auto toks = text::split_ws(*header);
    const auto n = toks.size() == 1 ? text::parse_int(toks[0]) : std::nullopt;
    if (!n || *n < 0) r.fail("malformed header, expected `n`");
    const auto size = static_cast<std::size_t>(*n);
    GramMatrix g;
    g.values = DenseMatrix(size, size);
    for (std::size_t i = 0; i < size; ++i) {
        const auto line = r.next();
        if (!line) r.fail_at(r.line_number() + 1, "missing row " + std::to_string(i + 1) + " of " +
                                                       std::to_string(size));
        const auto row = text::parse_row(r, *line, size);
        std::copy(row.begin(), row.end(), g.values.row(i).begin());
    }
    if (r.next()) r.fail("unexpected trailing content");
    for (std::size_t i = 0; i < size; ++i)
        for (std::size_t j = i + 1; j < size; ++j)
            if (std::abs(g(i, j) - g(j, i)) > 1e-12 * std::max(1.0, std::abs(g(i, j))))
                fail_data(source + ": Gram matrix is not symmetric at (" + std::to_string(i) +
                          ", " + std::to_string(j) + ")");
    return g;
}

void save_gram(const GramMatrix& g, const std::string& path) {
    std::ofstream os(path);
    if (!os) fail_data("cannot write '" + path + "'");
    write_gram(os, g);
    if (!os) fail_data("write failed for '" + path + "'");
}

GramMatrix load_gram(const std::string& path) {
    std::ifstream is(path);
    if (!is) fail_data("cannot open '" + path + "'");
    return read_gram(is, path);
}

void write_cross_gram(std::ostream& os, const DenseMatrix& m) {
    os << m.rows() << ' ' << m.cols() << '\n';
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (j) os << ' ';
            os << text::format_double(m(i, j));
        }
        os << '\n';
    }
}

DenseMatrix read_cross_gram(std::istream& is, const std::string& source) {
    text::LineReader r(is, source);
    const auto header = r.next();
    if (!header) r.fail("empty file, expected header `m n`");
    const auto toks = text::split_ws(*header);
    const auto m = toks.size() == 2 ? text::parse_int(toks[0]) : std::nullopt;
    const auto n = toks.size() == 2 ? text::parse_int(toks[1]) : std::nullopt;
    if (!m || !n || *m < 0 || *n < 0) r.fail("malformed header, expected `m n`");
    DenseMatrix out(static_cast<std::size_t>(*m), static_cast<std::size_t>(*n));
    for (std::size_t i = 0; i < out.rows(); ++i) {
        const auto line = r.next();
        if (!line) r.fail_at(r.line_number() + 1, "missing row " + std::to_string(i + 1));
        const auto row = text::parse_row(r, *line, out.cols());
        std::copy(row.begin(), row.end(), out.row(i).begin());
    }
    if (r.next()) r.fail("unexpected trailing content");
    return out;
}

void save_cross_gram(const DenseMatrix& m, const std::string& path) {
    std::ofstream os(path);
    if (!os) fail_data("cannot write '" + path + "'");
    write_cross_gram(os, m);
    if (!os) fail_data("write failed for '" + path + "'");
}

DenseMatrix load_cross_gram(const std::string& path) {
    std::ifstream is(path);
    if (!is) fail_data("cannot open '" + path + "'");
    return read_cross_gram(is, path);
}

}  // namespace ssgk
