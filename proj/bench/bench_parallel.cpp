// Serial reference vs OpenMP kernels: Gram assembly and batch factorization.

#include <benchmark/benchmark.h>

#include <vector>

#include "ssgk/data.hpp"
#include "ssgk/factorization.hpp"
#include "ssgk/kernel.hpp"
#include "ssgk/rng.hpp"

namespace {

std::vector<ssgk::FactorSet> random_factors(std::size_t count, std::size_t dim, std::size_t rank) {
    ssgk::Rng rng(11);
    std::vector<ssgk::FactorSet> out;
    for (std::size_t s = 0; s < count; ++s) {
        std::vector<ssgk::Vector> vs(rank, ssgk::Vector(dim));
        for (auto& v : vs)
            for (double& x : v) x = rng.normal();
        out.emplace_back(dim, std::move(vs));
    }
    return out;
}

std::vector<ssgk::SymmetricMatrix> synthetic_matrices(std::size_t per_class) {
    ssgk::SyntheticConfig cfg;
    cfg.dim = 34;
    cfg.train_per_class = per_class;
    cfg.test_per_class = 1;
    std::vector<ssgk::SymmetricMatrix> xs;
    for (auto& s : ssgk::generate_synthetic(cfg).train) xs.push_back(s.matrix);
    return xs;
}

void BM_GramSerial(benchmark::State& st) {
    const auto fs = random_factors(static_cast<std::size_t>(st.range(0)), 34, 6);
    for (auto _ : st) benchmark::DoNotOptimize(ssgk::build_gram_serial(fs, {0.01}));
}

void BM_GramParallel(benchmark::State& st) {
    const auto fs = random_factors(static_cast<std::size_t>(st.range(0)), 34, 6);
    for (auto _ : st) benchmark::DoNotOptimize(ssgk::build_gram(fs, {0.01}));
}

void BM_FactorizeSerial(benchmark::State& st) {
    const auto xs = synthetic_matrices(static_cast<std::size_t>(st.range(0)));
    ssgk::FactorizationConfig cfg;
    cfg.rank = 4;
    cfg.lambda = 1.0;
    for (auto _ : st) benchmark::DoNotOptimize(ssgk::factorize_all_serial(xs, cfg));
}

void BM_FactorizeParallel(benchmark::State& st) {
    const auto xs = synthetic_matrices(static_cast<std::size_t>(st.range(0)));
    ssgk::FactorizationConfig cfg;
    cfg.rank = 4;
    cfg.lambda = 1.0;
    for (auto _ : st) benchmark::DoNotOptimize(ssgk::factorize_all(xs, cfg));
}

}  // namespace

BENCHMARK(BM_GramSerial)->Arg(33)->Arg(99)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GramParallel)->Arg(33)->Arg(99)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FactorizeSerial)->Arg(11)->Arg(22)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FactorizeParallel)->Arg(11)->Arg(22)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
