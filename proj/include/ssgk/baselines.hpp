#pragma once

// Classical connectome features used as comparison baselines.

#include "ssgk/core.hpp"

namespace ssgk {

// Strict upper triangle, row-major: (x_01, x_02, ..., x_{I-2,I-1}).
[[nodiscard]] Vector edge_features(const SymmetricMatrix& x);

// Inverse of edge_features for zero-diagonal matrices.
[[nodiscard]] SymmetricMatrix from_edge_features(std::size_t dim, std::span<const double> edges);

// Weighted clustering coefficient, geometric-mean (Onnela) form:
//
//   c_i = sum_{j != k} (w_ij w_jk w_ik)^(1/3) / (k_i (k_i - 1))
//
// with weights normalized by the largest off-diagonal weight and k_i the
// number of nonzero neighbors; c_i = 0 when k_i < 2. Negative weights are
// rejected; an all-zero matrix yields the zero vector. Diagonal ignored.
[[nodiscard]] Vector clustering_coefficients(const SymmetricMatrix& x);
[[nodiscard]] double mean_clustering_coefficient(const SymmetricMatrix& x);

// Mean shortest-path distance over ordered reachable pairs i != j with edge
// length 1 / w_ij. Fully disconnected input is a data error.
[[nodiscard]] double characteristic_path_length(const SymmetricMatrix& x);

}  // namespace ssgk
