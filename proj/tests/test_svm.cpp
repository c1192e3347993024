#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>
#include <vector>

#include "oracles.hpp"
#include "ssgk/error.hpp"
#include "ssgk/kernel.hpp"
#include "ssgk/rng.hpp"
#include "ssgk/svm.hpp"

using namespace ssgk;

namespace {

GramMatrix gram_of(std::size_t n, std::vector<double> v) { return {DenseMatrix(n, n, std::move(v)), {}}; }

oracle::Mat to_mat(const GramMatrix& g) {
    oracle::Mat m(g.size(), std::vector<double>(g.size()));
    for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t j = 0; j < g.size(); ++j) m[i][j] = g(i, j);
    return m;
}

std::vector<Vector> xor_points() { return {{0, 0}, {1, 1}, {0, 1}, {1, 0}}; }
const std::vector<int> kXorLabels{1, 1, -1, -1};

SvmConfig with_c(double c) {
    SvmConfig cfg;
    cfg.c = c;
    return cfg;
}

// Three tight clusters far apart in the plane.
struct Clusters {
    std::vector<Vector> train;
    std::vector<std::string> train_labels;
    std::vector<Vector> test;
    std::vector<std::string> test_labels;
};

Clusters clusters(std::uint64_t seed) {
    Rng rng(seed);
    const double cx[3] = {0.0, 6.0, 0.0};
    const double cy[3] = {0.0, 0.0, 6.0};
    const char* names[3] = {"a", "b", "c"};
    Clusters out;
    for (int c = 0; c < 3; ++c) {
        for (int i = 0; i < 8; ++i) {
            out.train.push_back({cx[c] + 0.5 * rng.normal(), cy[c] + 0.5 * rng.normal()});
            out.train_labels.push_back(names[c]);
        }
        for (int i = 0; i < 4; ++i) {
            out.test.push_back({cx[c] + 0.5 * rng.normal(), cy[c] + 0.5 * rng.normal()});
            out.test_labels.push_back(names[c]);
        }
    }
    return out;
}

BinaryModel bias_only(double b) {
    BinaryModel m;
    m.alphas = {0.0};
    m.labels = {1};
    m.bias = b;
    return m;
}

}  // namespace

TEST_CASE("separable pair") {
    auto g = gram_of(2, {1, 0, 0, 1});
    std::vector<int> y{1, -1};
    auto m = train_binary(g, y, with_c(10));
    CHECK(m.converged);
    CHECK(classify(decision(m, std::vector{1.0, 0.0})) == 1);
    CHECK(classify(decision(m, std::vector{0.0, 1.0})) == -1);
    CHECK(m.support_indices == std::vector<std::size_t>{0, 1});
}

TEST_CASE("XOR reaches the QP oracle") {
    auto g = vector_gram(xor_points(), {1.0});
    auto m = train_binary(g, kXorLabels, with_c(10));
    for (std::size_t i = 0; i < 4; ++i) {
        std::vector<double> row(g.values.row(i).begin(), g.values.row(i).end());
        CHECK(classify(decision(m, row)) == kXorLabels[i]);
    }
    auto km = to_mat(g);
    auto a = oracle::svm_dual_pg(km, kXorLabels, 10.0, 1'000'000);
    const double want = oracle::svm_dual(km, kXorLabels, a);
    CHECK(std::abs(dual_objective(g, m) - want) <= 1e-4 * (1.0 + std::abs(want)));

    // Oracle decision values: bias from the oracle's free multipliers.
    double bsum = 0.0;
    int bcount = 0;
    for (std::size_t i = 0; i < 4; ++i) {
        if (a[i] > 1e-9 && a[i] < 10.0 - 1e-9) {
            double s = 0.0;
            for (std::size_t j = 0; j < 4; ++j) s += a[j] * kXorLabels[j] * km[i][j];
            bsum += kXorLabels[i] - s;
            ++bcount;
        }
    }
    REQUIRE(bcount > 0);
    const double ob = bsum / bcount;
    for (std::size_t i = 0; i < 4; ++i) {
        double s = ob;
        for (std::size_t j = 0; j < 4; ++j) s += a[j] * kXorLabels[j] * km[i][j];
        std::vector<double> row(g.values.row(i).begin(), g.values.row(i).end());
        CHECK(std::abs(decision(m, row) - s) <= 1e-3);
    }
}

TEST_CASE("train_binary errors") {
    auto g = gram_of(2, {1, 0, 0, 1});
    CHECK_THROWS_WITH_AS((void)train_binary(g, std::vector{1, 1}, with_c(1)),
                         doctest::Contains("single-class input"), Error);
    CHECK_THROWS_AS((void)train_binary(g, std::vector{1, 2}, with_c(1)), Error);
    CHECK_THROWS_AS((void)train_binary(g, std::vector{1}, with_c(1)), Error);
    CHECK_THROWS_AS((void)train_binary(gram_of(2, {1, NAN, NAN, 1}), std::vector{1, -1}, with_c(1)),
                    Error);
    CHECK_THROWS_AS((void)train_binary(g, std::vector{1, -1}, with_c(0)), Error);
}

TEST_CASE("SMO on random problems: feasibility, KKT and oracle agreement") {
    Rng rng(61);
    for (int t = 0; t < 15; ++t) {
        const std::size_t n = 4 + rng.index(9);
        std::vector<Vector> pts;
        for (std::size_t i = 0; i < n; ++i) pts.push_back(oracle::random_vector(rng, 3));
        std::vector<int> y(n);
        for (std::size_t i = 0; i < n; ++i) y[i] = i % 2 == 0 ? 1 : -1;
        rng.shuffle(y);
        const double c = std::ldexp(1.0, static_cast<int>(rng.index(7)) - 3);
        auto g = vector_gram(pts, {std::ldexp(1.0, static_cast<int>(rng.index(5)) - 2)});
        auto cfg = with_c(c);
        auto m = train_binary(g, y, cfg);
        CHECK(m.converged);

        double eq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(m.alphas[i] >= 0.0);
            CHECK(m.alphas[i] <= c);
            eq += m.alphas[i] * y[i];
        }
        CHECK(std::abs(eq) <= 1e-8 * c * static_cast<double>(n));

        for (std::size_t i = 0; i < n; ++i) {
            if (m.alphas[i] != 0.0) continue;
            std::vector<double> row(g.values.row(i).begin(), g.values.row(i).end());
            CHECK(y[i] * decision(m, row) >= 1.0 - cfg.kkt_tol);
        }

        auto km = to_mat(g);
        const double want = oracle::svm_dual(km, y, oracle::svm_dual_pg(km, y, c, 1'000'000));
        CHECK(dual_objective(g, m) >= want - 1e-4 * (1.0 + std::abs(want)));
    }
}

TEST_CASE("SMO is deterministic") {
    Rng rng(62);
    std::vector<Vector> pts;
    for (int i = 0; i < 12; ++i) pts.push_back(oracle::random_vector(rng, 2));
    std::vector<int> y{1, -1, 1, -1, 1, -1, 1, -1, 1, -1, 1, -1};
    auto g = vector_gram(pts, {2.0});
    auto a = train_binary(g, y, with_c(4));
    auto b = train_binary(g, y, with_c(4));
    CHECK(a.alphas == b.alphas);
    CHECK(a.bias == b.bias);
}

TEST_CASE("decision") {
    auto m = bias_only(0.5);
    CHECK(decision(m, std::vector{123.0}) == 0.5);
    CHECK(classify(0.0) == 1);
    CHECK(classify(-1e-300) == -1);
    CHECK_THROWS_AS((void)decision(m, std::vector{1.0, 2.0}), Error);
}

TEST_CASE("scaling the Gram by s and C by 1/s keeps supports and predictions") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        auto cl = clusters(seed);
        std::vector<Vector> tr(cl.train.begin(), cl.train.begin() + 16);  // classes a and b
        std::vector<int> y(16);
        for (int i = 0; i < 16; ++i) y[i] = i < 8 ? 1 : -1;
        const RbfParams p{0.1};
        auto g = vector_gram(tr, p);
        GramMatrix gs = g;
        for (double& v : gs.values.values()) v *= 4.0;
        auto m1 = train_binary(g, y, with_c(2.0));
        auto m4 = train_binary(gs, y, with_c(0.5));
        CHECK(m1.support_indices == m4.support_indices);
        std::vector<Vector> te(cl.test.begin(), cl.test.begin() + 8);
        auto cross = vector_cross_gram(te, tr, p);
        for (std::size_t t = 0; t < te.size(); ++t) {
            std::vector<double> r1(cross.row(t).begin(), cross.row(t).end());
            std::vector<double> r4 = r1;
            for (double& v : r4) v *= 4.0;
            CHECK(classify(decision(m1, r1)) == classify(decision(m4, r4)));
            CHECK(classify(decision(m1, r1)) == (t < 4 ? 1 : -1));
        }
    }
}

TEST_CASE("multiclass training and prediction") {
    auto cl = clusters(9);
    const RbfParams p{0.2};
    auto g = vector_gram(cl.train, p);
    auto m = train_multiclass(g, cl.train_labels, with_c(8));
    CHECK(m.classes == std::vector<std::string>{"a", "b", "c"});
    CHECK(m.pairwise.size() == 3);
    CHECK(accuracy(predict(m, g.values), cl.train_labels) == 100.0);

    auto cross = vector_cross_gram(cl.test, cl.train, p);
    auto pred = predict(m, cross);

    // Independent vote count from the same binary decisions.
    for (std::size_t t = 0; t < cl.test.size(); ++t) {
        std::map<std::size_t, int> votes;
        std::map<std::size_t, double> margins;
        for (const auto& pm : m.pairwise) {
            double s = pm.model.bias;
            for (std::size_t i = 0; i < pm.train_indices.size(); ++i)
                s += pm.model.alphas[i] * pm.model.labels[i] * cross(t, pm.train_indices[i]);
            const std::size_t w = s >= 0 ? pm.positive_class : pm.negative_class;
            votes[w] += 1;
            margins[w] += std::abs(s);
        }
        std::size_t best = 0;
        for (std::size_t c = 0; c < 3; ++c) {
            const int vb = votes.count(best) ? votes[best] : 0;
            const int vc = votes.count(c) ? votes[c] : 0;
            if (vc > vb || (vc == vb && margins[c] > margins[best])) best = c;
        }
        CHECK(pred[t] == m.classes[best]);
    }
    CHECK(accuracy(pred, cl.test_labels) == 100.0);

    SUBCASE("a training row predicts its own label") {
        auto row = g.block(std::vector<std::size_t>{5}, std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20, 21, 22, 23});
        CHECK(predict(m, row)[0] == cl.train_labels[5]);
    }
    SUBCASE("shape mismatch") {
        CHECK_THROWS_AS((void)predict(m, DenseMatrix(1, 3)), Error);
    }
}

TEST_CASE("two-class multiclass reduces to train_binary") {
    auto cl = clusters(10);
    std::vector<Vector> tr(cl.train.begin(), cl.train.begin() + 16);
    std::vector<std::string> labels(cl.train_labels.begin(), cl.train_labels.begin() + 16);
    auto g = vector_gram(tr, {0.3});
    auto mc = train_multiclass(g, labels, with_c(1));
    REQUIRE(mc.pairwise.size() == 1);
    std::vector<int> y(16);
    for (int i = 0; i < 16; ++i) y[i] = labels[i] == "a" ? 1 : -1;
    auto b = train_binary(g, y, with_c(1));
    CHECK(mc.pairwise[0].model.alphas == b.alphas);
    CHECK(mc.pairwise[0].model.bias == b.bias);
    std::vector<Vector> te(cl.test.begin(), cl.test.begin() + 8);
    auto cross = vector_cross_gram(te, tr, {0.3});
    auto pred = predict(mc, cross);
    for (std::size_t t = 0; t < te.size(); ++t) {
        std::vector<double> r(cross.row(t).begin(), cross.row(t).end());
        CHECK(pred[t] == (classify(decision(b, r)) > 0 ? "a" : "b"));
    }
}

TEST_CASE("multiclass errors") {
    auto g = gram_of(2, {1, 0, 0, 1});
    std::vector<std::string> one{"x", "x"};
    CHECK_THROWS_AS((void)train_multiclass(g, one, with_c(1)), Error);
    std::vector<std::string> short_labels{"x"};
    CHECK_THROWS_AS((void)train_multiclass(g, short_labels, with_c(1)), Error);
}

TEST_CASE("vote ties") {
    MulticlassModel m;
    m.classes = {"p", "q", "r"};
    m.train_size = 1;
    auto pair = [](std::size_t a, std::size_t b, double bias) {
        PairwiseModel pm;
        pm.positive_class = a;
        pm.negative_class = b;
        pm.train_indices = {0};
        pm.model = bias_only(bias);
        return pm;
    };
    DenseMatrix row(1, 1, 1.0);
    SUBCASE("largest summed margin wins") {
        m.pairwise = {pair(0, 1, 0.5), pair(0, 2, -2.0), pair(1, 2, 1.0)};
        CHECK(predict(m, row)[0] == "r");
    }
    SUBCASE("equal margins fall back to class order") {
        m.pairwise = {pair(0, 1, 1.0), pair(0, 2, -1.0), pair(1, 2, 1.0)};
        CHECK(predict(m, row)[0] == "p");
    }
    SUBCASE("majority beats margin") {
        m.pairwise = {pair(0, 1, 0.1), pair(0, 2, 0.1), pair(1, 2, -50.0)};
        CHECK(predict(m, row)[0] == "p");
    }
}

TEST_CASE("accuracy and formatting") {
    auto pct = [](std::size_t correct, std::size_t total) {
        std::vector<std::string> truth(total, "a");
        std::vector<std::string> pred(total, "b");
        for (std::size_t i = 0; i < correct; ++i) pred[i] = "a";
        return format_accuracy(accuracy(pred, truth));
    };
    CHECK(pct(24, 33) == "72.73");
    CHECK(pct(21, 33) == "63.64");
    CHECK(pct(23, 33) == "69.70");
    CHECK(pct(33, 33) == "100.00");
    CHECK(pct(0, 5) == "0.00");
    std::vector<std::string> empty;
    CHECK_THROWS_AS((void)accuracy(empty, empty), Error);
    std::vector<std::string> one{"a"};
    CHECK_THROWS_AS((void)accuracy(one, empty), Error);
}

TEST_CASE("model text round-trip") {
    auto cl = clusters(11);
    auto g = vector_gram(cl.train, {0.2});
    auto m = train_multiclass(g, cl.train_labels, with_c(2));
    ModelMetadata meta{2.0, 0.2, 3, 0.5};
    std::stringstream ss;
    write_model(ss, m, meta);
    ModelMetadata back_meta;
    auto back = read_model(ss, &back_meta);
    CHECK(back.classes == m.classes);
    CHECK(back.train_size == m.train_size);
    REQUIRE(back.pairwise.size() == m.pairwise.size());
    for (std::size_t k = 0; k < m.pairwise.size(); ++k) {
        CHECK(back.pairwise[k].train_indices == m.pairwise[k].train_indices);
        CHECK(back.pairwise[k].model.alphas == m.pairwise[k].model.alphas);
        CHECK(back.pairwise[k].model.bias == m.pairwise[k].model.bias);
        CHECK(back.pairwise[k].model.support_indices == m.pairwise[k].model.support_indices);
    }
    CHECK(back_meta.c == 2.0);
    CHECK(back_meta.gamma == 0.2);
    CHECK(back_meta.rank == 3);
    CHECK(back_meta.lambda == 0.5);
    auto cross = vector_cross_gram(cl.test, cl.train, {0.2});
    CHECK(predict(back, cross) == predict(m, cross));

    std::istringstream bad("ssgk-model 2\n");
    CHECK_THROWS_AS((void)read_model(bad), Error);
}
