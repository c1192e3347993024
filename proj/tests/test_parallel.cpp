#include <doctest.h>

#include <omp.h>

#include "oracles.hpp"
#include "ssgk/factorization.hpp"
#include "ssgk/error.hpp"
#include "ssgk/kernel.hpp"
#include "ssgk/rng.hpp"
#include "ssgk/svm.hpp"

using namespace ssgk;

// The OpenMP kernels must agree bit-for-bit with the serial references, for
// any thread count, including more threads than cores.

namespace {

std::vector<FactorSet> random_sets(Rng& rng, std::size_t count) {
    std::vector<FactorSet> out;
    for (std::size_t i = 0; i < count; ++i) out.push_back(oracle::random_factors(rng, 6, 1 + rng.index(4)));
    return out;
}

struct ThreadCount {
    int saved = omp_get_max_threads();
    explicit ThreadCount(int n) { omp_set_num_threads(n); }
    ~ThreadCount() { omp_set_num_threads(saved); }
};

}  // namespace

TEST_CASE("gram assembly matches the serial reference") {
    Rng rng(1);
    auto train = random_sets(rng, 37);
    auto test = random_sets(rng, 11);
    const auto serial = build_gram_serial(train, {0.3});
    const auto cross_serial = build_cross_gram_serial(test, train, {0.3});
    const auto norm_serial = build_gram_serial(train, {0.3}, {.normalize = true});
    for (int threads : {1, 2, 3, 8}) {
        ThreadCount tc(threads);
        CHECK(build_gram(train, {0.3}).values == serial.values);
        CHECK(build_cross_gram(test, train, {0.3}) == cross_serial);
        CHECK(build_gram(train, {0.3}, {.normalize = true}).values == norm_serial.values);
    }
}

TEST_CASE("vector gram matches the serial reference") {
    Rng rng(2);
    std::vector<Vector> feats;
    for (int i = 0; i < 29; ++i) feats.push_back(oracle::random_vector(rng, 15));
    const auto serial = vector_gram_serial(feats, {0.05});
    for (int threads : {1, 4}) {
        ThreadCount tc(threads);
        CHECK(vector_gram(feats, {0.05}).values == serial.values);
    }
}

TEST_CASE("batch factorization matches the serial reference") {
    Rng rng(3);
    std::vector<SymmetricMatrix> xs;
    for (int i = 0; i < 9; ++i) xs.push_back(oracle::random_symmetric(rng, 5));
    FactorizationConfig cfg;
    cfg.rank = 2;
    cfg.lambda = 0.5;
    const auto serial = factorize_all_serial(xs, cfg);
    for (int threads : {2, 5}) {
        ThreadCount tc(threads);
        const auto par = factorize_all(xs, cfg);
        REQUIRE(par.size() == serial.size());
        for (std::size_t i = 0; i < par.size(); ++i) {
            CHECK(par[i].factors == serial[i].factors);
            CHECK(par[i].objective_trace == serial[i].objective_trace);
        }
    }
}

TEST_CASE("batch factorization reports the lowest failing sample") {
    std::vector<SymmetricMatrix> xs{SymmetricMatrix::identity(3), SymmetricMatrix::identity(3)};
    FactorizationConfig cfg;
    cfg.rank = 1;
    cfg.max_iters = 0;
    ThreadCount tc(4);
    CHECK_THROWS_AS((void)factorize_all(xs, cfg), Error);
}

TEST_CASE("pairwise SVM training does not depend on thread count") {
    Rng rng(4);
    std::vector<Vector> pts;
    std::vector<std::string> labels;
    for (int i = 0; i < 30; ++i) {
        pts.push_back(oracle::random_vector(rng, 3));
        labels.push_back(std::string(1, static_cast<char>('a' + i % 4)));
    }
    auto g = vector_gram(pts, {0.5});
    SvmConfig cfg;
    cfg.c = 2.0;
    MulticlassModel ref;
    {
        ThreadCount tc(1);
        ref = train_multiclass(g, labels, cfg);
    }
    ThreadCount tc(6);
    auto m = train_multiclass(g, labels, cfg);
    REQUIRE(m.pairwise.size() == 6);
    for (std::size_t k = 0; k < 6; ++k) {
        CHECK(m.pairwise[k].model.alphas == ref.pairwise[k].model.alphas);
        CHECK(m.pairwise[k].model.bias == ref.pairwise[k].model.bias);
    }
}
