#include "ssgk/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ssgk/error.hpp"

namespace ssgk {

namespace {

void require_nonnegative(const SymmetricMatrix& x, const char* who) {
    const std::size_t n = x.dim();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && x(i, j) < 0.0)
                fail_data(std::string(who) + ": negative weight at (" + std::to_string(i) + ", " +
                          std::to_string(j) + ")");
}

}  // namespace

Vector edge_features(const SymmetricMatrix& x) {
    const std::size_t n = x.dim();
    Vector out;
    out.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) out.push_back(x(i, j));
    return out;
}

SymmetricMatrix from_edge_features(std::size_t dim, std::span<const double> edges) {
    if (edges.size() != dim * (dim - 1) / 2) fail_data("from_edge_features: wrong edge count");
    std::vector<double> v(dim * dim, 0.0);
    std::size_t k = 0;
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = i + 1; j < dim; ++j, ++k) {
            v[i * dim + j] = edges[k];
            v[j * dim + i] = edges[k];
        }
    return SymmetricMatrix(dim, std::move(v));
}

Vector clustering_coefficients(const SymmetricMatrix& x) {
    require_nonnegative(x, "clustering_coefficients");
    const std::size_t n = x.dim();
    double wmax = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) wmax = std::max(wmax, x(i, j));
    Vector c(n, 0.0);
    if (wmax == 0.0) return c;

    // Cube roots of normalized weights, diagonal zeroed.
    std::vector<double> cr(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) cr[i * n + j] = std::cbrt(x(i, j) / wmax);

    for (std::size_t i = 0; i < n; ++i) {
        std::size_t degree = 0;
        for (std::size_t j = 0; j < n; ++j) degree += (j != i && x(i, j) > 0.0);
        if (degree < 2) continue;
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i || cr[i * n + j] == 0.0) continue;
            for (std::size_t k = 0; k < n; ++k) {
                if (k == i || k == j) continue;
                s += cr[i * n + j] * cr[j * n + k] * cr[i * n + k];
            }
        }
        c[i] = s / static_cast<double>(degree * (degree - 1));
    }
    return c;
}

double mean_clustering_coefficient(const SymmetricMatrix& x) {
    const Vector c = clustering_coefficients(x);
    double s = 0.0;
    for (double v : c) s += v;
    return s / static_cast<double>(c.size());
}

double characteristic_path_length(const SymmetricMatrix& x) {
    require_nonnegative(x, "characteristic_path_length");
    const std::size_t n = x.dim();
    constexpr double inf = std::numeric_limits<double>::infinity();

    // Dense Dijkstra from every source.
    std::vector<double> found;
    std::vector<double> dist(n);
    std::vector<char> done(n);
    for (std::size_t src = 0; src < n; ++src) {
        std::fill(dist.begin(), dist.end(), inf);
        std::fill(done.begin(), done.end(), 0);
        dist[src] = 0.0;
        for (std::size_t step = 0; step < n; ++step) {
            std::size_t u = n;
            for (std::size_t v = 0; v < n; ++v)
                if (!done[v] && dist[v] < inf && (u == n || dist[v] < dist[u])) u = v;
            if (u == n) break;
            done[u] = 1;
            for (std::size_t v = 0; v < n; ++v) {
                if (v == u || done[v] || x(u, v) <= 0.0) continue;
                const double alt = dist[u] + 1.0 / x(u, v);
                if (alt < dist[v]) dist[v] = alt;
            }
        }
        for (std::size_t v = 0; v < n; ++v) {
            if (v != src && dist[v] < inf) found.push_back(dist[v]);
        }
    }
    if (found.empty()) fail_data("characteristic_path_length: graph has no edges");
    // Summing in sorted order makes the result independent of node labelling.
    std::sort(found.begin(), found.end());
    double total = 0.0;
    for (double d : found) total += d;
    return total / static_cast<double>(found.size());
}

}  // namespace ssgk
