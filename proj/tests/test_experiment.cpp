#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "ssgk/data.hpp"
#include "ssgk/error.hpp"
#include "ssgk/experiment.hpp"

using namespace ssgk;

namespace {

LabeledSamples from(const std::vector<SyntheticSample>& s) {
    LabeledSamples out;
    for (const auto& x : s) {
        out.ids.push_back(x.name);
        out.matrices.push_back(x.matrix);
        out.labels.push_back(x.label);
    }
    return out;
}

SyntheticDataset small_dataset() {
    SyntheticConfig cfg;
    cfg.dim = 6;
    cfg.train_per_class = 6;
    cfg.test_per_class = 3;
    cfg.noise_sigma = 0.1;
    return generate_synthetic(cfg);
}

GridSearchConfig one_config() {
    GridSearchConfig cfg;
    cfg.grid.c_values = {1.0};
    cfg.grid.gamma_values = {0.125};
    cfg.grid.r_values = {2};
    cfg.grid.lambda_values = {0.5};
    return cfg;
}

}  // namespace

TEST_CASE("grid parsing") {
    CHECK(parse_real_grid("1,0.5,2^3") == std::vector<double>{1.0, 0.5, 8.0});
    CHECK(parse_real_grid("2^-2..2^1") == std::vector<double>{0.25, 0.5, 1.0, 2.0});
    CHECK(parse_real_grid(" 2^0 .. 2^1 , 3") == std::vector<double>{1.0, 2.0, 3.0});
    CHECK(parse_rank_grid("1..3,7") == std::vector<std::size_t>{1, 2, 3, 7});
    CHECK(parse_rank_grid("4") == std::vector<std::size_t>{4});
    for (const char* bad : {"", "1,,2", "2^x", "2^3..2^1", "abc"})
        CHECK_THROWS_AS((void)parse_real_grid(bad), Error);
    for (const char* bad : {"0", "3..1", "x", "1.5", "-2"}) CHECK_THROWS_AS((void)parse_rank_grid(bad), Error);
}

TEST_CASE("default grids") {
    GridSpec g;
    CHECK(g.c_values.size() == 17);
    CHECK(g.c_values.front() == 1.0 / 256);
    CHECK(g.c_values.back() == 256.0);
    CHECK(g.gamma_values == g.c_values);
    CHECK(g.r_values.size() == 12);
    CHECK(g.lambda_values.front() == 0.25);
    CHECK(g.lambda_values.back() == 256.0);
    CHECK(g.lambda_values.size() == 11);

    GridSpec u;
    u.r_values = {3, 1, 3};
    CHECK(u.normalized().r_values == std::vector<std::size_t>{1, 3});
    u.c_values = {};
    CHECK_THROWS_AS(u.validate(), Error);
}

TEST_CASE("stratified folds") {
    std::vector<std::string> labels;
    for (int i = 0; i < 7; ++i) labels.push_back("a");
    for (int i = 0; i < 5; ++i) labels.push_back("b");
    auto f = stratified_folds(labels, 3, 1);
    std::map<std::pair<std::string, std::size_t>, int> counts;
    for (std::size_t i = 0; i < labels.size(); ++i) counts[{labels[i], f[i]}]++;
    CHECK(counts[{"a", 0}] == 3);
    CHECK(counts[{"a", 1}] == 2);
    CHECK(counts[{"a", 2}] == 2);
    CHECK(counts[{"b", 0}] == 2);
    CHECK(counts[{"b", 2}] == 1);
    CHECK(stratified_folds(labels, 3, 1) == f);
    CHECK(stratified_folds(labels, 3, 2) != f);
    CHECK_THROWS_AS((void)stratified_folds(labels, 6, 1), Error);
    CHECK_THROWS_AS((void)stratified_folds(labels, 1, 1), Error);
}

TEST_CASE("methods") {
    CHECK(method_from_name("edge") == Method::edge);
    CHECK(method_name(Method::cc) == "cc");
    CHECK_THROWS_AS((void)method_from_name("cpl"), Error);
    SymmetricMatrix tri(3, {0, 1, 1, 1, 0, 1, 1, 1, 0});
    CHECK(baseline_features(tri, Method::edge) == Vector{1, 1, 1});
    CHECK(baseline_features(tri, Method::cc) == Vector{1, 1, 1});
    CHECK(baseline_features(tri, Method::cc, true) == Vector{1});
}

TEST_CASE("single configuration grid") {
    auto ds = small_dataset();
    auto train = from(ds.train);
    auto test = from(ds.test);
    auto out = grid_search(train, &test, one_config());
    REQUIRE(out.report.rows.size() == 1);
    CHECK(out.report.best == 0);
    CHECK(out.metadata.rank == 2);
    CHECK(out.train_factors.size() == train.size());
    CHECK(out.test_factors.size() == test.size());
    CHECK(out.test_cross.rows() == test.size());
    CHECK(out.test_cross.cols() == train.size());
    CHECK(out.test_predictions.size() == test.size());
    REQUIRE(out.report.test_accuracy.has_value());
    CHECK(*out.report.test_accuracy == accuracy(out.test_predictions, test.labels));

    const auto text = format_report(out.report);
    CHECK(text.find("best: R=2 lambda=0.5 gamma=0.125 C=1") != std::string::npos);
    CHECK(text.find("test accuracy: ") != std::string::npos);
    const auto csv = report_csv(out.report);
    CHECK(csv.rfind("method,R,lambda,gamma,C,val_accuracy,best\nssgk,2,0.5,0.125,1,", 0) == 0);
}

TEST_CASE("ties prefer smaller R, lambda, gamma, C") {
    auto ds = small_dataset();
    auto train = from(ds.train);
    GridSearchConfig cfg;
    cfg.grid.c_values = {4.0, 2.0};
    cfg.grid.gamma_values = {0.5, 0.25};
    cfg.grid.r_values = {3, 2};
    cfg.grid.lambda_values = {1.0, 0.5};
    auto out = grid_search(train, nullptr, cfg);
    const auto& rows = out.report.rows;
    REQUIRE(rows.size() == 16);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto a = std::tuple(rows[i - 1].rank, rows[i - 1].lambda, rows[i - 1].gamma, rows[i - 1].c);
        const auto b = std::tuple(rows[i].rank, rows[i].lambda, rows[i].gamma, rows[i].c);
        CHECK(a < b);
    }
    double top = 0.0;
    for (const auto& r : rows) top = std::max(top, r.val_accuracy);
    const auto& best = out.report.best_row();
    CHECK(best.val_accuracy == top);
    for (std::size_t i = 0; i < out.report.best; ++i) CHECK(rows[i].val_accuracy < top);
    CHECK(!out.report.test_accuracy.has_value());
}

TEST_CASE("baseline grid search") {
    auto ds = small_dataset();
    auto train = from(ds.train);
    auto test = from(ds.test);
    GridSearchConfig cfg = one_config();
    cfg.method = Method::edge;
    auto out = grid_search(train, &test, cfg);
    CHECK(out.report.rows.size() == 1);
    CHECK(out.report.rows[0].rank == 0);
    CHECK(out.train_factors.empty());
    CHECK(out.test_cross.cols() == train.size());
    CHECK(format_report(out.report).find("best: gamma=") != std::string::npos);
}

TEST_CASE("grid search errors") {
    auto ds = small_dataset();
    auto train = from(ds.train);
    auto cfg = one_config();
    cfg.folds = 7;
    CHECK_THROWS_AS((void)grid_search(train, nullptr, cfg), Error);
    cfg = one_config();
    cfg.grid.gamma_values.clear();
    CHECK_THROWS_AS((void)grid_search(train, nullptr, cfg), Error);
}
