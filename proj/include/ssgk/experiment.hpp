#pragma once

// Grid search with stratified k-fold cross-validation on the training split,
// followed by a refit on the full training set and optional test scoring.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ssgk/core.hpp"
#include "ssgk/factorization.hpp"
#include "ssgk/kernel.hpp"
#include "ssgk/svm.hpp"

namespace ssgk {

enum class Method { ssgk, edge, cc };
[[nodiscard]] Method method_from_name(std::string_view name);
[[nodiscard]] std::string_view method_name(Method m);

// {2^lo, ..., 2^hi}
[[nodiscard]] std::vector<double> power_of_two_range(int lo, int hi);

struct GridSpec {
    std::vector<double> c_values = power_of_two_range(-8, 8);
    std::vector<double> gamma_values = power_of_two_range(-8, 8);
    std::vector<std::size_t> r_values = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
    std::vector<double> lambda_values = power_of_two_range(-2, 8);

    void validate() const;
    // Sorted ascending, duplicates removed; this is also the tie-break order.
    [[nodiscard]] GridSpec normalized() const;
};

// Comma-separated items; each item is a number, `2^k`, or a range
// `2^a..2^b` (powers of two, step one in the exponent).
[[nodiscard]] std::vector<double> parse_real_grid(std::string_view text);
// Comma-separated integers or `a..b` ranges.
[[nodiscard]] std::vector<std::size_t> parse_rank_grid(std::string_view text);

// Fold id per sample. Each class's indices are shuffled (classes in sorted
// order, one seeded stream) and dealt round-robin into k folds. Throws when
// a class has fewer than k samples.
[[nodiscard]] std::vector<std::size_t> stratified_folds(std::span<const std::string> labels,
                                                        std::size_t k, std::uint64_t seed);

struct LabeledSamples {
    std::vector<std::string> ids;
    std::vector<SymmetricMatrix> matrices;
    std::vector<std::string> labels;

    [[nodiscard]] std::size_t size() const noexcept { return matrices.size(); }
};

struct GridRow {
    std::size_t rank = 0;  // 0 for baselines (no factorization)
    double lambda = 0.0;
    double gamma = 0.0;
    double c = 0.0;
    double val_accuracy = 0.0;
};

struct ExperimentReport {
    Method method = Method::ssgk;
    std::size_t folds = 0;
    std::uint64_t seed = 0;
    std::size_t train_size = 0;
    std::size_t test_size = 0;
    std::vector<GridRow> rows;
    std::size_t best = 0;
    std::optional<double> test_accuracy;
    std::size_t nonconverged_factorizations = 0;
    std::size_t nonconverged_svms = 0;
    double wall_seconds = 0.0;

    [[nodiscard]] const GridRow& best_row() const { return rows.at(best); }
};

struct GridSearchConfig {
    Method method = Method::ssgk;
    GridSpec grid;
    std::size_t folds = 3;
    std::uint64_t seed = 0;
    FactorizationConfig factorization;  // rank and lambda come from the grid
    SvmConfig svm;                      // c comes from the grid
    GramOptions gram;
    bool cc_mean = false;  // CC baseline: mean coefficient instead of per-node vector
};

struct GridSearchOutcome {
    ExperimentReport report;
    std::vector<FactorSet> train_factors;  // ssgk only
    std::vector<FactorSet> test_factors;
    GramMatrix train_gram;
    DenseMatrix test_cross;
    MulticlassModel model;
    ModelMetadata metadata;
    std::vector<std::string> test_predictions;
};

// Baseline feature vector for one sample (edge or cc methods).
[[nodiscard]] Vector baseline_features(const SymmetricMatrix& x, Method m, bool cc_mean = false);

[[nodiscard]] GridSearchOutcome grid_search(const LabeledSamples& train, const LabeledSamples* test,
                                            const GridSearchConfig& cfg);

// Aligned plain-text table (wall time excluded so the text is reproducible).
[[nodiscard]] std::string format_report(const ExperimentReport& r);
[[nodiscard]] std::string report_csv(const ExperimentReport& r);

}  // namespace ssgk
