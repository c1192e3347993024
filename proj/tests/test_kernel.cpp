#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "oracles.hpp"
#include "ssgk/error.hpp"
#include "ssgk/kernel.hpp"
#include "ssgk/rng.hpp"

using namespace ssgk;

namespace {

std::vector<FactorSet> random_sets(Rng& rng, std::size_t count, std::size_t dim) {
    std::vector<FactorSet> out;
    for (std::size_t i = 0; i < count; ++i) out.push_back(oracle::random_factors(rng, dim, 1 + rng.index(3)));
    return out;
}

std::vector<std::vector<double>> comps(const FactorSet& f) { return f.components(); }

}  // namespace

TEST_CASE("rbf examples") {
    const std::vector<double> x{0.3, -1.2};
    CHECK(rbf(x, x, {0.7}) == 1.0);
    CHECK(rbf(std::vector{0.0, 0.0}, std::vector{1.0, 0.0}, {1.0}) ==
          doctest::Approx(0.3678794).epsilon(1e-7));
    CHECK(rbf(std::vector{0.0}, std::vector{1.0}, {1e4}) < 1e-300);
    CHECK_THROWS_AS((void)rbf(std::vector{0.0}, std::vector{1.0, 2.0}, {1.0}), Error);
    CHECK_THROWS_AS(RbfParams{0.0}.validate(), Error);
    CHECK_THROWS_AS(RbfParams{-1.0}.validate(), Error);
    CHECK_THROWS_AS(RbfParams{INFINITY}.validate(), Error);
}

TEST_CASE("ssgk examples") {
    FactorSet one(2, {{0.4, -2.0}});
    CHECK(ssgk::ssgk(one, one, {3.0}) == 1.0);
    FactorSet fx(2, {{0, 0}, {1, 0}});
    FactorSet fy(2, {{0, 0}});
    CHECK(ssgk::ssgk(fx, fy, {1.0}) == doctest::Approx(1.0 + std::exp(-2.0)).epsilon(1e-15));
    CHECK(ssgk::ssgk(fx, fy, {1.0}) == doctest::Approx(1.1353353).epsilon(1e-7));
    CHECK_THROWS_AS((void)ssgk::ssgk(fx, FactorSet(3, {{0, 0, 0}}), {1.0}), Error);
}

TEST_CASE("ssgk equals the naive double sum") {
    Rng rng(41);
    for (int t = 0; t < 200; ++t) {
        const std::size_t dim = 1 + rng.index(4);
        auto fx = oracle::random_factors(rng, dim, 1 + rng.index(3));
        auto fy = oracle::random_factors(rng, dim, 1 + rng.index(3));
        const double gamma = std::ldexp(1.0, static_cast<int>(rng.index(9)) - 4);
        const double got = ssgk::ssgk(fx, fy, {gamma});
        const double want = oracle::naive_ssgk(comps(fx), comps(fy), gamma);
        CHECK(std::abs(got - want) <= 1e-12 * want);
        CHECK(got > 0.0);
        CHECK(std::abs(got - ssgk::ssgk(fy, fx, {gamma})) <= 1e-12 * got);
        CHECK(ssgk::ssgk(fx, fx, {gamma}) >= static_cast<double>(fx.rank()));
    }
}

TEST_CASE("ssgk is invariant to component order") {
    Rng rng(42);
    for (int t = 0; t < 50; ++t) {
        auto fx = oracle::random_factors(rng, 4, 3);
        auto fy = oracle::random_factors(rng, 4, 3);
        auto vs = fx.components();
        rng.shuffle(vs);
        FactorSet px(4, vs);
        const double a = ssgk::ssgk(fx, fy, {0.5});
        CHECK(std::abs(a - ssgk::ssgk(px, fy, {0.5})) <= 1e-12 * a);
    }
}

TEST_CASE("ssgk_with accepts another base kernel") {
    FactorSet fx(2, {{1, 2}, {0, 1}});
    FactorSet fy(2, {{3, 0}});
    auto linear = [](std::span<const double> a, std::span<const double> b) { return dot(a, b); };
    CHECK(ssgk_with(fx, fy, linear) == 9.0 + 0.0);
}

TEST_CASE("build_gram examples") {
    Rng rng(43);
    auto f = oracle::random_factors(rng, 3, 2);
    SUBCASE("single sample") {
        std::vector<FactorSet> s{f};
        auto g = build_gram(s, {1.0});
        CHECK(g.size() == 1);
        CHECK(g(0, 0) == ssgk::ssgk(f, f, {1.0}));
        CHECK(g(0, 0) >= 1.0);
    }
    SUBCASE("two identical samples") {
        std::vector<FactorSet> s{f, f};
        auto g = build_gram(s, {1.0});
        CHECK(g(0, 0) == g(0, 1));
        CHECK(g(1, 0) == g(1, 1));
        CHECK(g(0, 0) == g(1, 1));
    }
    SUBCASE("dimension mismatch") {
        std::vector<FactorSet> s{f, oracle::random_factors(rng, 4, 2)};
        CHECK_THROWS_AS((void)build_gram(s, {1.0}), Error);
    }
    SUBCASE("normalized diagonal is one") {
        auto s = random_sets(rng, 5, 3);
        auto g = build_gram(s, {1.0}, {.normalize = true});
        for (std::size_t i = 0; i < 5; ++i) CHECK(g(i, i) == doctest::Approx(1.0).epsilon(1e-15));
        auto raw = build_gram(s, {1.0});
        CHECK(g(0, 1) == doctest::Approx(raw(0, 1) / std::sqrt(raw(0, 0) * raw(1, 1))).epsilon(1e-14));
    }
}

TEST_CASE("random Grams are PSD and exactly symmetric") {
    Rng rng(44);
    for (double gamma : {1.0 / 16, 1.0, 16.0}) {
        auto s = random_sets(rng, 10, 4);
        auto g = build_gram(s, {gamma});
        for (std::size_t i = 0; i < g.size(); ++i)
            for (std::size_t j = 0; j < g.size(); ++j) CHECK(g(i, j) == g(j, i));
        auto rep = psd_report(g, 1e-8);
        CHECK(rep.is_psd);
        CHECK(rep.min_eig >= -1e-8 * rep.max_eig);
    }
}

TEST_CASE("cross gram") {
    Rng rng(45);
    auto train = random_sets(rng, 5, 3);
    auto test = random_sets(rng, 3, 3);
    SUBCASE("entries match direct calls") {
        auto m = build_cross_gram(test, train, {0.5});
        CHECK(m.rows() == 3);
        CHECK(m.cols() == 5);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 5; ++j) CHECK(m(i, j) == ssgk::ssgk(test[i], train[j], {0.5}));
    }
    SUBCASE("test == train reproduces the Gram") {
        CHECK(build_cross_gram(train, train, {0.5}) == build_gram(train, {0.5}).values);
        CHECK(build_cross_gram(train, train, {0.5}, {.normalize = true}) ==
              build_gram(train, {0.5}, {.normalize = true}).values);
    }
    SUBCASE("empty test list") {
        auto m = build_cross_gram({}, train, {0.5});
        CHECK(m.rows() == 0);
        CHECK(m.cols() == 5);
    }
}

TEST_CASE("psd_report examples") {
    GramMatrix id{DenseMatrix(2, 2, std::vector{1.0, 0.0, 0.0, 1.0}), {}};
    auto r = psd_report(id);
    CHECK(r.min_eig == 1.0);
    CHECK(r.is_psd);
    GramMatrix bad{DenseMatrix(2, 2, std::vector{1.0, 2.0, 2.0, 1.0}), {}};
    r = psd_report(bad);
    CHECK(r.min_eig == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(!r.is_psd);
}

TEST_CASE("vector gram") {
    std::vector<Vector> one{{1.0, 2.0}};
    CHECK(vector_gram(one, {1.0}).values.values() == std::vector{1.0});
    std::vector<Vector> same{{1.0, 2.0}, {1.0, 2.0}};
    CHECK(vector_gram(same, {1.0}).values.values() == std::vector{1.0, 1.0, 1.0, 1.0});
    Rng rng(46);
    std::vector<Vector> three;
    for (int i = 0; i < 3; ++i) three.push_back(oracle::random_vector(rng, 4));
    auto g = vector_gram(three, {0.3});
    CHECK(psd_report(g, 1e-8).is_psd);
    CHECK(g(0, 1) == doctest::Approx(oracle::naive_rbf(three[0], three[1], 0.3)).epsilon(1e-14));
    auto m = vector_cross_gram(three, three, {0.3});
    CHECK(m == g.values);
    std::vector<Vector> ragged{{1.0}, {1.0, 2.0}};
    CHECK_THROWS_AS((void)vector_gram(ragged, {1.0}), Error);
}

TEST_CASE("gram subset and block") {
    GramMatrix g{DenseMatrix(3, 3, std::vector<double>{1, 2, 3, 2, 5, 6, 3, 6, 9}), {"a", "b", "c"}};
    std::vector<std::size_t> idx{2, 0};
    auto s = g.subset(idx);
    CHECK(s.values.values() == std::vector<double>{9, 3, 3, 1});
    CHECK(s.row_ids == std::vector<std::string>{"c", "a"});
    std::vector<std::size_t> rows{1};
    auto b = g.block(rows, idx);
    CHECK(b.values() == std::vector<double>{6, 2});
}

TEST_CASE("gram text round-trip") {
    Rng rng(47);
    auto g = build_gram(random_sets(rng, 4, 3), {0.25});
    std::stringstream ss;
    write_gram(ss, g);
    auto back = read_gram(ss);
    CHECK(back.values == g.values);

    auto m = build_cross_gram(random_sets(rng, 2, 3), random_sets(rng, 3, 3), {0.25});
    std::stringstream cs;
    write_cross_gram(cs, m);
    CHECK(read_cross_gram(cs) == m);
}

TEST_CASE("gram reader errors") {
    auto expect_error = [](const std::string& text, const std::string& fragment) {
        std::istringstream is(text);
        try {
            (void)read_gram(is, "g.txt");
            FAIL("no error for: " << text);
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::data);
            CHECK_MESSAGE(std::string(e.what()).find(fragment) != std::string::npos, e.what());
        }
    };
    expect_error("2\n1 0\n", "g.txt:3");
    expect_error("2\n1 0\n0 x\n", "g.txt:3");
    expect_error("2\n1 0 0\n0 1\n", "g.txt:2");
    expect_error("2\n1 0.5\n0 1\n", "symmetric");
    expect_error("abc\n", "g.txt:1");
}
