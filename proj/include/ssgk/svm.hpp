#pragma once

// Soft-margin C-SVM on precomputed kernels: SMO for the binary dual and a
// one-vs-one multiclass wrapper.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ssgk/core.hpp"
#include "ssgk/kernel.hpp"

namespace ssgk {

struct SvmConfig {
    double c = 1.0;
    double kkt_tol = 1e-3;
    std::size_t max_passes = 10;  // consecutive stalled updates before giving up
    std::size_t max_iters = 1'000'000;
    std::uint64_t seed = 0;       // random second-choice fallback
    bool check_psd = true;        // warn on indefinite Gram (costs one eigensolve)

    void validate() const;
};

struct BinaryModel {
    std::vector<double> alphas;  // in [0, C]
    std::vector<int> labels;     // +1 / -1 per training sample
    double bias = 0.0;
    double c = 1.0;
    std::vector<std::size_t> support_indices;  // alpha > 1e-12
    bool converged = false;
    std::size_t iterations = 0;

    [[nodiscard]] std::size_t size() const noexcept { return alphas.size(); }
};

// Maximize sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij subject to
// 0 <= alpha <= C and sum alpha_i y_i = 0. Throws on single-class input or
// non-finite Gram entries. Hitting max_iters returns the last iterate with
// converged == false.
[[nodiscard]] BinaryModel train_binary(const GramMatrix& g, std::span<const int> y,
                                       const SvmConfig& cfg);

// Dual objective of the model's alphas on the given Gram.
[[nodiscard]] double dual_objective(const GramMatrix& g, const BinaryModel& m);

// sum_i alpha_i y_i k(x_i, x) + b
[[nodiscard]] double decision(const BinaryModel& m, std::span<const double> kernel_row);
[[nodiscard]] inline int classify(double score) { return score >= 0.0 ? 1 : -1; }

struct PairwiseModel {
    std::size_t positive_class = 0;  // index into classes; label +1
    std::size_t negative_class = 0;  // label -1
    std::vector<std::size_t> train_indices;  // rows of the full training Gram
    BinaryModel model;
};

struct MulticlassModel {
    std::vector<std::string> classes;  // sorted, distinct
    std::vector<PairwiseModel> pairwise;
    std::size_t train_size = 0;
};

// One-vs-one. Pairwise problems are independent and trained in parallel.
[[nodiscard]] MulticlassModel train_multiclass(const GramMatrix& g,
                                               std::span<const std::string> labels,
                                               const SvmConfig& cfg);

// Majority vote; ties go to the largest summed |decision| over the pairwise
// models each tied class won, then to the earlier class in `classes`.
// `cross` is test x train.
[[nodiscard]] std::vector<std::string> predict(const MulticlassModel& m, const DenseMatrix& cross);

// 100 * correct / total.
[[nodiscard]] double accuracy(std::span<const std::string> predicted,
                              std::span<const std::string> truth);
// Two decimals, e.g. 72.73.
[[nodiscard]] std::string format_accuracy(double percent);

// Header (n, classes, C, gamma, R, lambda) then one block per pairwise model.
struct ModelMetadata {
    double c = 0.0;
    double gamma = 0.0;
    std::size_t rank = 0;
    double lambda = 0.0;
};
void write_model(std::ostream& os, const MulticlassModel& m, const ModelMetadata& meta);
[[nodiscard]] MulticlassModel read_model(std::istream& is, ModelMetadata* meta = nullptr,
                                         const std::string& source = "<model>");

}  // namespace ssgk
