// ssgk: factorize connectomes, build kernels, train/evaluate SVMs and run
// grid searches from the command line.

#include <omp.h>

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ssgk/baselines.hpp"
#include "ssgk/core.hpp"
#include "ssgk/data.hpp"
#include "ssgk/error.hpp"
#include "ssgk/experiment.hpp"
#include "ssgk/factorization.hpp"
#include "ssgk/kernel.hpp"
#include "ssgk/svm.hpp"
#include "ssgk/text_io.hpp"

namespace fs = std::filesystem;
using namespace ssgk;

namespace {

struct Common {
    std::string manifest;
    std::string out;
    std::uint64_t seed = 0;
    int jobs = 0;
};

void add_common(CLI::App* cmd, Common& c, bool with_manifest = true) {
    if (with_manifest) cmd->add_option("--manifest", c.manifest, "Sample manifest CSV (path,label,group)");
    cmd->add_option("--seed", c.seed, "Random seed");
    cmd->add_option("--jobs", c.jobs, "Worker threads (0 = OpenMP default)");
}

void apply_jobs(int jobs) {
    if (jobs > 0) omp_set_num_threads(jobs);
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) fail_data("cannot create output directory '" + dir.string() + "': " + ec.message());
}

void write_text(const fs::path& p, const std::string& s) {
    std::ofstream os(p);
    if (!os) fail_data("cannot write '" + p.string() + "'");
    os << s;
    if (!os) fail_data("write failed for '" + p.string() + "'");
}

std::optional<Group> parse_group_filter(const std::string& g) {
    if (g == "all") return std::nullopt;
    if (g == "train") return Group::train;
    if (g == "test") return Group::test;
    fail_usage("unknown group '" + g + "'; allowed values: train, test, all");
}

std::vector<ManifestRow> filter_rows(const SampleManifest& m, std::optional<Group> g) {
    return g ? m.select(*g) : m.rows;
}

// Inputs are either positional files or a manifest.
std::vector<ManifestRow> gather_rows(const std::vector<std::string>& files, const std::string& manifest,
                                     std::optional<Group> group, ManifestOptions opts = {}) {
    if (!files.empty() && !manifest.empty()) fail_usage("give input files or --manifest, not both");
    if (!manifest.empty()) return filter_rows(load_manifest(manifest, opts), group);
    if (files.empty()) fail_usage("no inputs: give input files or --manifest");
    std::vector<ManifestRow> rows;
    for (const auto& f : files) rows.push_back({fs::path(f), "", Group::train});
    return rows;
}

template <class Load>
auto load_each(const std::vector<ManifestRow>& rows, Load load) {
    std::vector<decltype(load(rows.front().path))> out;
    for (const auto& r : rows) out.push_back(load(r.path));
    return out;
}

std::string stem_of(const fs::path& p) {
    std::string s = p.filename().string();
    for (const char* ext : {".factors.txt", ".txt"}) {
        const std::string e = ext;
        if (s.size() > e.size() && s.compare(s.size() - e.size(), e.size(), e) == 0)
            return s.substr(0, s.size() - e.size());
    }
    return p.stem().string();
}

// Output names: file stems when unique, index-prefixed otherwise.
std::vector<std::string> output_stems(const std::vector<ManifestRow>& rows) {
    std::vector<std::string> stems;
    std::set<std::string> seen;
    bool unique = true;
    for (const auto& r : rows) {
        stems.push_back(stem_of(r.path));
        unique = unique && seen.insert(stems.back()).second;
    }
    if (!unique) {
        char buf[16];
        for (std::size_t i = 0; i < stems.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%04zu_", i);
            stems[i] = buf + stems[i];
        }
    }
    return stems;
}

FactorizationConfig factor_flags(CLI::App* cmd, FactorizationConfig& fc) {
    cmd->add_option("--max-iters", fc.max_iters, "Proximal-gradient iteration cap")->capture_default_str();
    cmd->add_option("--rel-tol", fc.rel_tol, "Relative objective decrease for convergence")->capture_default_str();
    cmd->add_option("--shrink", fc.backtrack_shrink, "Backtracking step shrink factor")->capture_default_str();
    cmd->add_option("--step", fc.initial_step, "Initial step size")->capture_default_str();
    cmd->add_option("--restarts", fc.restarts, "Seeded random restarts after the spectral start")->capture_default_str();
    return fc;
}

void svm_flags(CLI::App* cmd, SvmConfig& sc) {
    cmd->add_option("--kkt-tol", sc.kkt_tol, "SMO KKT tolerance")->capture_default_str();
    cmd->add_option("--max-svm-iters", sc.max_iters, "SMO iteration cap")->capture_default_str();
}

// ---------------------------------------------------------------- factorize
struct FactorizeArgs {
    Common common;
    std::vector<std::string> inputs;
    std::size_t rank = 1;
    double lambda = 0.0;
    FactorizationConfig fc;
};

int cmd_factorize(FactorizeArgs& a) {
    apply_jobs(a.common.jobs);
    a.fc.rank = a.rank;
    a.fc.lambda = a.lambda;
    a.fc.seed = a.common.seed;
    a.fc.validate();
    const auto rows = gather_rows(a.inputs, a.common.manifest, std::nullopt);
    const fs::path out = a.common.out;
    ensure_dir(out);

    std::vector<SymmetricMatrix> xs;
    for (const auto& r : rows) xs.push_back(load_matrix(r.path));
    std::vector<FactorizationResult> results;
    try {
        results = factorize_all(xs, a.fc);
    } catch (const Error& e) {
        throw Error(e.kind(), std::string("factorize: ") + e.what());
    }

    const auto stems = output_stems(rows);
    SampleManifest fm;
    std::ostringstream report;
    report << "sample,objective,residual,iterations,converged\n";
    std::printf("%-32s %24s %24s %10s %9s\n", "sample", "objective", "residual", "iterations",
                "converged");
    bool all_converged = true;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const fs::path fp = out / (stems[i] + ".factors.txt");
        save_factors(results[i].factors, fp);
        fm.rows.push_back({fp, rows[i].label, rows[i].group});
        const double resid = frobenius_residual(xs[i], results[i].factors);
        const auto obj = text::format_double(results[i].final_objective());
        const auto res = text::format_double(resid);
        report << rows[i].display() << ',' << obj << ',' << res << ','
               << results[i].iterations << ',' << (results[i].converged ? 1 : 0) << '\n';
        std::printf("%-32s %24s %24s %10zu %9s\n", stems[i].c_str(), obj.c_str(), res.c_str(),
                    results[i].iterations, results[i].converged ? "yes" : "no");
        all_converged = all_converged && results[i].converged;
    }
    write_text(out / "factorize_report.csv", report.str());
    if (!a.common.manifest.empty() || rows.size() > 1) save_manifest(fm, out / "factors.csv");
    if (!all_converged) {
        std::fprintf(stderr, "error: numerical: one or more factorizations did not converge\n");
        return 3;
    }
    return 0;
}

// --------------------------------------------------------------------- gram
struct GramArgs {
    Common common;
    std::vector<std::string> inputs;
    std::string method = "ssgk";
    double gamma = 1.0;
    bool normalize = false;
    bool cc_mean = false;
    std::string group = "all";
    std::string against_group;
};

int cmd_gram(GramArgs& a) {
    apply_jobs(a.common.jobs);
    const Method method = method_from_name(a.method);
    const RbfParams kp{a.gamma};
    kp.validate();
    const auto rows = gather_rows(a.inputs, a.common.manifest, parse_group_filter(a.group));
    if (rows.empty()) fail_data("no samples selected");
    std::vector<ManifestRow> cols;
    const bool cross = !a.against_group.empty();
    if (cross) {
        if (a.common.manifest.empty()) fail_usage("--against-group requires --manifest");
        cols = filter_rows(load_manifest(a.common.manifest), parse_group_filter(a.against_group));
        if (cols.empty()) fail_data("no samples selected by --against-group");
    }
    if (a.common.out.empty()) fail_usage("--out is required");

    auto check_dims = [](const auto& items, const std::vector<ManifestRow>& rs, auto dim_of) {
        for (std::size_t i = 1; i < items.size(); ++i)
            if (dim_of(items[i]) != dim_of(items[0]))
                fail_data("dimension mismatch: '" + rs[i].path.string() + "' has dim " +
                          std::to_string(dim_of(items[i])) + " but '" + rs[0].path.string() +
                          "' has dim " + std::to_string(dim_of(items[0])));
    };

    if (method == Method::ssgk) {
        const auto fr = load_each(rows, [](const fs::path& p) { return load_factors(p); });
        const auto dim = [](const FactorSet& f) { return f.dim(); };
        check_dims(fr, rows, dim);
        const GramOptions go{a.normalize};
        if (cross) {
            const auto fc = load_each(cols, [](const fs::path& p) { return load_factors(p); });
            check_dims(fc, cols, dim);
            if (fc.front().dim() != fr.front().dim())
                fail_data("dimension mismatch between '" + rows.front().path.string() + "' and '" +
                          cols.front().path.string() + "'");
            save_cross_gram(build_cross_gram(fr, fc, kp, go), a.common.out);
            return 0;
        }
        GramMatrix g = build_gram(fr, kp, go);
        const PsdReport pr = psd_report(g);
        save_gram(g, a.common.out);
        std::fprintf(stderr, "psd: min_eig=%.17g max_eig=%.17g is_psd=%s\n", pr.min_eig, pr.max_eig,
                     pr.is_psd ? "true" : "false");
        return 0;
    }

    auto features = [&](const std::vector<ManifestRow>& rs) {
        const auto xs = load_each(rs, [](const fs::path& p) { return load_matrix(p); });
        check_dims(xs, rs, [](const SymmetricMatrix& x) { return x.dim(); });
        std::vector<Vector> fv;
        for (const auto& x : xs) fv.push_back(baseline_features(x, method, a.cc_mean));
        return fv;
    };
    const auto fr = features(rows);
    if (cross) {
        const auto fc = features(cols);
        if (fc.front().size() != fr.front().size()) fail_data("feature length mismatch between groups");
        save_cross_gram(vector_cross_gram(fr, fc, kp), a.common.out);
        return 0;
    }
    const GramMatrix g = vector_gram(fr, kp);
    const PsdReport pr = psd_report(g);
    save_gram(g, a.common.out);
    std::fprintf(stderr, "psd: min_eig=%.17g max_eig=%.17g is_psd=%s\n", pr.min_eig, pr.max_eig,
                 pr.is_psd ? "true" : "false");
    return 0;
}

// -------------------------------------------------------------------- train
struct TrainArgs {
    Common common;
    std::string gram;
    std::string group = "train";
    SvmConfig svm;
    ModelMetadata meta;
};

int cmd_train(TrainArgs& a) {
    apply_jobs(a.common.jobs);
    if (a.common.manifest.empty()) fail_usage("--manifest is required");
    if (a.common.out.empty()) fail_usage("--out is required");
    a.svm.seed = a.common.seed;
    a.meta.c = a.svm.c;
    const GramMatrix g = load_gram(a.gram);
    const auto rows = filter_rows(load_manifest(a.common.manifest), parse_group_filter(a.group));
    if (rows.size() != g.size())
        fail_data("misaligned counts: Gram has " + std::to_string(g.size()) + " rows but manifest selects " +
                  std::to_string(rows.size()) + " samples");
    std::vector<std::string> labels;
    for (const auto& r : rows) labels.push_back(r.label);
    const MulticlassModel m = train_multiclass(g, labels, a.svm);
    {
        std::ofstream os(a.common.out);
        if (!os) fail_data("cannot write '" + a.common.out + "'");
        write_model(os, m, a.meta);
    }
    const auto pred = predict(m, g.values);
    std::printf("train accuracy: %s\n", format_accuracy(accuracy(pred, labels)).c_str());
    for (const auto& pm : m.pairwise) {
        if (!pm.model.converged) {
            std::fprintf(stderr, "error: numerical: SMO did not converge for class pair %s/%s\n",
                         m.classes[pm.positive_class].c_str(), m.classes[pm.negative_class].c_str());
            return 3;
        }
    }
    return 0;
}

// ------------------------------------------------------------------ predict
struct PredictArgs {
    Common common;
    std::string model;
    std::string cross;
    std::string group = "test";
    std::string score;
};

int score_predictions(const std::string& path) {
    std::ifstream is(path);
    if (!is) fail_data("cannot open '" + path + "'");
    text::LineReader r(is, path, false);
    const auto header = r.next();
    if (!header) r.fail("empty predictions file");
    std::vector<std::string> cols;
    {
        std::stringstream ss(*header);
        std::string c;
        while (std::getline(ss, c, ',')) cols.emplace_back(text::trim(c));
    }
    auto find = [&](const char* name) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < cols.size(); ++i)
            if (cols[i] == name) return i;
        return std::nullopt;
    };
    const auto pc = find("predicted");
    const auto tc = find("truth");
    if (!pc) r.fail("missing column 'predicted'");
    if (!tc) {
        std::printf("notice: no truth column; accuracy omitted\n");
        return 0;
    }
    std::vector<std::string> pred, truth;
    while (const auto line = r.next()) {
        if (text::trim(*line).empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(*line);
        std::string c;
        while (std::getline(ss, c, ',')) f.emplace_back(text::trim(c));
        if (line->back() == ',') f.emplace_back();
        if (f.size() != cols.size()) r.fail("field count does not match header");
        pred.push_back(f[*pc]);
        truth.push_back(f[*tc]);
    }
    std::printf("accuracy: %s\n", format_accuracy(accuracy(pred, truth)).c_str());
    return 0;
}

int cmd_predict(PredictArgs& a) {
    apply_jobs(a.common.jobs);
    if (!a.score.empty()) return score_predictions(a.score);
    if (a.model.empty() || a.cross.empty()) fail_usage("--model and --cross are required");
    std::ifstream ms(a.model);
    if (!ms) fail_data("cannot open '" + a.model + "'");
    const MulticlassModel m = read_model(ms, nullptr, a.model);
    const DenseMatrix cross = load_cross_gram(a.cross);

    std::vector<ManifestRow> rows;
    if (!a.common.manifest.empty()) {
        rows = filter_rows(load_manifest(a.common.manifest, {.label_optional = true, .group_optional = true}),
                           parse_group_filter(a.group));
        if (rows.size() != cross.rows())
            fail_data("misaligned counts: kernel block has " + std::to_string(cross.rows()) +
                      " rows but manifest selects " + std::to_string(rows.size()) + " samples");
    }
    const auto pred = predict(m, cross);

    const bool have_truth = !rows.empty() && std::all_of(rows.begin(), rows.end(),
                                                         [](const ManifestRow& r) { return !r.label.empty(); });
    std::ostringstream csv;
    csv << (have_truth ? "path,predicted,truth\n" : "path,predicted\n");
    for (std::size_t i = 0; i < pred.size(); ++i) {
        csv << (rows.empty() ? std::to_string(i) : rows[i].display()) << ',' << pred[i];
        if (have_truth) csv << ',' << rows[i].label;
        csv << '\n';
    }
    if (a.common.out.empty())
        std::cout << csv.str();
    else
        write_text(a.common.out, csv.str());

    if (have_truth) {
        std::vector<std::string> truth;
        for (const auto& r : rows) truth.push_back(r.label);
        std::printf("accuracy: %s\n", format_accuracy(accuracy(pred, truth)).c_str());
    } else {
        std::printf("notice: no truth labels; accuracy omitted\n");
    }
    return 0;
}

// -------------------------------------------------------------- grid-search
struct GridArgs {
    Common common;
    std::string test_manifest;
    std::string method = "ssgk";
    std::string c_grid = "2^-8..2^8";
    std::string gamma_grid = "2^-8..2^8";
    std::string r_grid = "1..12";
    std::string lambda_grid = "2^-2..2^8";
    std::size_t folds = 3;
    bool csv = false;
    bool normalize = false;
    bool cc_mean = false;
    FactorizationConfig fc;
    SvmConfig svm;
};

LabeledSamples load_samples(const std::vector<ManifestRow>& rows) {
    LabeledSamples s;
    for (const auto& r : rows) {
        s.ids.push_back(r.display());
        s.matrices.push_back(load_matrix(r.path));
        s.labels.push_back(r.label);
    }
    return s;
}

int cmd_grid_search(GridArgs& a) {
    apply_jobs(a.common.jobs);
    if (a.common.manifest.empty()) fail_usage("--manifest is required");
    if (a.common.out.empty()) fail_usage("--out is required");

    GridSearchConfig cfg;
    cfg.method = method_from_name(a.method);
    cfg.grid.c_values = parse_real_grid(a.c_grid);
    cfg.grid.gamma_values = parse_real_grid(a.gamma_grid);
    cfg.grid.r_values = parse_rank_grid(a.r_grid);
    cfg.grid.lambda_values = parse_real_grid(a.lambda_grid);
    cfg.folds = a.folds;
    cfg.seed = a.common.seed;
    cfg.factorization = a.fc;
    cfg.factorization.seed = a.common.seed;
    cfg.svm = a.svm;
    cfg.svm.seed = a.common.seed;
    cfg.gram.normalize = a.normalize;
    cfg.cc_mean = a.cc_mean;

    const SampleManifest m = load_manifest(a.common.manifest);
    const auto train_rows = m.select(Group::train);
    auto test_rows = m.select(Group::test);
    if (!a.test_manifest.empty()) {
        const auto extra = load_manifest(a.test_manifest, {.label_optional = true}).rows;
        test_rows.insert(test_rows.end(), extra.begin(), extra.end());
    }
    if (train_rows.empty()) fail_data("manifest '" + a.common.manifest + "' has no train rows");

    const LabeledSamples train = load_samples(train_rows);
    const LabeledSamples test = load_samples(test_rows);
    const GridSearchOutcome res = grid_search(train, test_rows.empty() ? nullptr : &test, cfg);

    const fs::path out = a.common.out;
    ensure_dir(out);
    write_text(out / "report.txt", format_report(res.report));
    if (a.csv) write_text(out / "report.csv", report_csv(res.report));
    save_gram(res.train_gram, (out / "gram.txt").string());
    {
        std::ofstream os(out / "model.txt");
        if (!os) fail_data("cannot write model file");
        write_model(os, res.model, res.metadata);
    }
    if (cfg.method == Method::ssgk) {
        ensure_dir(out / "factors");
        // Stems are computed over train and test together so names cannot collide.
        std::vector<ManifestRow> all_rows = train_rows;
        all_rows.insert(all_rows.end(), test_rows.begin(), test_rows.end());
        std::vector<FactorSet> all_factors = res.train_factors;
        all_factors.insert(all_factors.end(), res.test_factors.begin(), res.test_factors.end());
        const auto stems = output_stems(all_rows);
        SampleManifest fm;
        for (std::size_t i = 0; i < all_rows.size(); ++i) {
            const fs::path fp = out / "factors" / (stems[i] + ".factors.txt");
            save_factors(all_factors[i], fp);
            fm.rows.push_back({fp, all_rows[i].label, all_rows[i].group});
        }
        save_manifest(fm, out / "factors.csv");
    }
    if (!test_rows.empty()) {
        save_cross_gram(res.test_cross, (out / "cross.txt").string());
        std::ostringstream csv;
        csv << "path,predicted,truth\n";
        for (std::size_t i = 0; i < test_rows.size(); ++i)
            csv << test_rows[i].display() << ',' << res.test_predictions[i] << ','
                << test_rows[i].label << '\n';
        write_text(out / "predictions.csv", csv.str());
    }

    const GridRow& b = res.report.best_row();
    std::printf("configurations: %zu\n", res.report.rows.size());
    if (cfg.method == Method::ssgk)
        std::printf("best: R=%zu lambda=%s gamma=%s C=%s val_acc=%s\n", b.rank,
                    text::format_double(b.lambda).c_str(), text::format_double(b.gamma).c_str(),
                    text::format_double(b.c).c_str(), format_accuracy(b.val_accuracy).c_str());
    else
        std::printf("best: gamma=%s C=%s val_acc=%s\n", text::format_double(b.gamma).c_str(),
                    text::format_double(b.c).c_str(), format_accuracy(b.val_accuracy).c_str());
    if (res.report.test_accuracy)
        std::printf("test accuracy: %s\n", format_accuracy(*res.report.test_accuracy).c_str());
    std::printf("wall time: %.2f s\n", res.report.wall_seconds);
    return 0;
}

// -------------------------------------------------------------------- bands
struct BandsArgs {
    Common common;
    std::vector<std::string> inputs;
    std::string band;
};

int cmd_bands(BandsArgs& a) {
    apply_jobs(a.common.jobs);
    const BandSpec band = band_by_name(a.band);
    if (a.common.out.empty()) fail_usage("--out is required");
    const auto rows = gather_rows(a.inputs, a.common.manifest, std::nullopt);
    const fs::path out = a.common.out;
    ensure_dir(out);
    const auto stems = output_stems(rows);
    SampleManifest bm;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const SymmetricMatrix avg = band_average(load_stacked(rows[i].path), band);
        const fs::path p = out / (stems[i] + "." + band.name + ".txt");
        save_matrix(avg, p);
        bm.rows.push_back({p, rows[i].label, rows[i].group});
    }
    if (!a.common.manifest.empty()) save_manifest(bm, out / "manifest.csv");
    return 0;
}

// -------------------------------------------------------------------- synth
struct SynthArgs {
    Common common;
    SyntheticConfig cfg;
};

int cmd_synth(SynthArgs& a) {
    if (a.common.out.empty()) fail_usage("--out is required");
    a.cfg.seed = a.common.seed;
    write_synthetic(generate_synthetic(a.cfg), a.common.out);
    return 0;
}

int run(int argc, char** argv) {
    CLI::App app{"Sparse symmetric factorization, structure-preserving graph kernels and SVM tools"};
    app.require_subcommand(1);
    int rc = 0;

    FactorizeArgs fa;
    auto* f = app.add_subcommand("factorize", "Sparse symmetric rank-R factorization of matrix files");
    add_common(f, fa.common);
    f->add_option("inputs", fa.inputs, "Matrix files");
    f->add_option("--out", fa.common.out, "Output directory")->required();
    f->add_option("--rank,-R", fa.rank, "Number of rank-one components")->required();
    f->add_option("--lambda", fa.lambda, "l1 weight")->capture_default_str();
    factor_flags(f, fa.fc);
    f->callback([&] { rc = cmd_factorize(fa); });

    GramArgs ga;
    auto* g = app.add_subcommand("gram", "Kernel matrix over factor files (ssgk) or raw matrices (edge, cc)");
    add_common(g, ga.common);
    g->add_option("inputs", ga.inputs, "Factor or matrix files");
    g->add_option("--out", ga.common.out, "Output file")->required();
    g->add_option("--gamma", ga.gamma, "RBF width")->required();
    g->add_option("--method", ga.method, "ssgk | edge | cc")->capture_default_str();
    g->add_flag("--normalize", ga.normalize, "Cosine-normalize kernel values");
    g->add_flag("--cc-mean", ga.cc_mean, "CC baseline: use mean coefficient");
    g->add_option("--group", ga.group, "Manifest rows: train | test | all")->capture_default_str();
    g->add_option("--against-group", ga.against_group,
                  "Emit a rectangular block against these manifest rows (e.g. test vs train)");
    g->callback([&] { rc = cmd_gram(ga); });

    TrainArgs ta;
    auto* t = app.add_subcommand("train", "Train a one-vs-one SVM on a precomputed Gram");
    add_common(t, ta.common);
    t->add_option("--gram", ta.gram, "Gram file")->required();
    t->add_option("--out", ta.common.out, "Model file")->required();
    t->add_option("--c,-C", ta.svm.c, "SVM trade-off C")->required();
    t->add_option("--group", ta.group, "Manifest rows aligned with the Gram")->capture_default_str();
    t->add_option("--gamma", ta.meta.gamma, "Recorded in the model header");
    t->add_option("--rank,-R", ta.meta.rank, "Recorded in the model header");
    t->add_option("--lambda", ta.meta.lambda, "Recorded in the model header");
    svm_flags(t, ta.svm);
    t->callback([&] { rc = cmd_train(ta); });

    PredictArgs pa;
    auto* p = app.add_subcommand("predict", "Predict labels from a test x train kernel block");
    add_common(p, pa.common);
    p->add_option("--model", pa.model, "Model file");
    p->add_option("--cross", pa.cross, "Test x train kernel file");
    p->add_option("--out", pa.common.out, "Predictions CSV (stdout when omitted)");
    p->add_option("--group", pa.group, "Manifest rows aligned with the kernel rows")->capture_default_str();
    p->add_option("--score", pa.score, "Only score an existing predictions CSV");
    p->callback([&] { rc = cmd_predict(pa); });

    GridArgs sa;
    auto* s = app.add_subcommand("grid-search", "Cross-validated grid search with optional test evaluation");
    add_common(s, sa.common);
    s->add_option("--test-manifest", sa.test_manifest, "Additional test rows");
    s->add_option("--out", sa.common.out, "Output directory")->required();
    s->add_option("--method", sa.method, "ssgk | edge | cc")->capture_default_str();
    s->add_option("--c-grid", sa.c_grid, "C values")->capture_default_str();
    s->add_option("--gamma-grid", sa.gamma_grid, "RBF gamma values")->capture_default_str();
    s->add_option("--r-grid", sa.r_grid, "Ranks")->capture_default_str();
    s->add_option("--lambda-grid", sa.lambda_grid, "l1 weights")->capture_default_str();
    s->add_option("--folds", sa.folds, "Cross-validation folds")->capture_default_str();
    s->add_flag("--csv", sa.csv, "Also write report.csv");
    s->add_flag("--normalize", sa.normalize, "Cosine-normalize kernel values");
    s->add_flag("--cc-mean", sa.cc_mean, "CC baseline: use mean coefficient");
    factor_flags(s, sa.fc);
    svm_flags(s, sa.svm);
    s->callback([&] { rc = cmd_grid_search(sa); });

    BandsArgs ba;
    auto* b = app.add_subcommand("bands", "Average stacked frequency tensors over a band");
    add_common(b, ba.common);
    b->add_option("inputs", ba.inputs, "Stacked tensor files");
    b->add_option("--band", ba.band, "delta | theta | alpha | beta | all")->required();
    b->add_option("--out", ba.common.out, "Output directory")->required();
    b->callback([&] { rc = cmd_bands(ba); });

    SynthArgs ya;
    ya.common.seed = ya.cfg.seed;
    auto* y = app.add_subcommand("synth", "Generate a synthetic labeled connectome dataset");
    add_common(y, ya.common, false);
    y->add_option("--out", ya.common.out, "Output directory")->required();
    y->add_option("--classes", ya.cfg.num_classes)->capture_default_str();
    y->add_option("--dim", ya.cfg.dim)->capture_default_str();
    y->add_option("--template-rank", ya.cfg.template_rank)->capture_default_str();
    y->add_option("--sigma", ya.cfg.noise_sigma)->capture_default_str();
    y->add_option("--train-per-class", ya.cfg.train_per_class)->capture_default_str();
    y->add_option("--test-per-class", ya.cfg.test_per_class)->capture_default_str();
    y->callback([&] { rc = cmd_synth(ya); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::fprintf(stderr, "error: usage: %s\n", e.what());
        return 1;
    }
    return rc;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s: %s\n", std::string(kind_name(e.kind())).c_str(), e.what());
        return e.exit_code();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: data: %s\n", e.what());
        return 2;
    }
}
