#include "ssgk/data.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>

#include "ssgk/error.hpp"
#include "ssgk/rng.hpp"
#include "ssgk/text_io.hpp"

namespace ssgk {

namespace fs = std::filesystem;

namespace {

std::size_t parse_count(const text::LineReader& r, std::string_view tok, const char* what) {
    const auto v = text::parse_int(tok);
    if (!v || *v < 1) r.fail(std::string("malformed header: ") + what + " must be a positive integer");
    return static_cast<std::size_t>(*v);
}

std::vector<double> read_square_block(text::LineReader& r, std::size_t dim, const std::string& what) {
    std::vector<double> values;
    values.reserve(dim * dim);
    for (std::size_t i = 0; i < dim; ++i) {
        const auto line = r.next();
        if (!line)
            r.fail_at(r.line_number() + 1, "unexpected end of file: missing " + what + "row " +
                                               std::to_string(i + 1) + " of " + std::to_string(dim));
        const auto row = text::parse_row(r, *line, dim);
        values.insert(values.end(), row.begin(), row.end());
    }
    return values;
}

void expect_eof(text::LineReader& r) {
    if (r.next()) r.fail("unexpected trailing content");
}

std::ifstream open_in(const fs::path& path) {
    std::ifstream is(path);
    if (!is) fail_data("cannot open '" + path.string() + "'");
    return is;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream os(path);
    if (!os) fail_data("cannot write '" + path.string() + "'");
    return os;
}

void write_row(std::ostream& os, std::span<const double> row) {
    for (std::size_t j = 0; j < row.size(); ++j) {
        if (j) os << ' ';
        os << text::format_double(row[j]);
    }
    os << '\n';
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::vector<std::string> split_csv(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.emplace_back(text::trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace

SymmetricMatrix read_matrix(std::istream& is, const std::string& source) {
    text::LineReader r(is, source);
    const auto header = r.next();
    if (!header) r.fail("empty file, expected header `I`");
    const auto toks = text::split_ws(*header);
    if (toks.size() != 1) r.fail("malformed header, expected a single dimension `I`");
    const std::size_t dim = parse_count(r, toks[0], "I");
    auto values = read_square_block(r, dim, "");
    expect_eof(r);
    return SymmetricMatrix(dim, std::move(values));
}

void write_matrix(std::ostream& os, const SymmetricMatrix& x) {
    os << x.dim() << '\n';
    for (std::size_t i = 0; i < x.dim(); ++i) write_row(os, x.row(i));
}

SymmetricMatrix load_matrix(const fs::path& path) {
    auto is = open_in(path);
    return read_matrix(is, path.string());
}

void save_matrix(const SymmetricMatrix& x, const fs::path& path) {
    auto os = open_out(path);
    write_matrix(os, x);
    if (!os) fail_data("write failed for '" + path.string() + "'");
}

FactorSet read_factors(std::istream& is, const std::string& source) {
    text::LineReader r(is, source);
    const auto header = r.next();
    if (!header) r.fail("empty file, expected header `I R`");
    const auto toks = text::split_ws(*header);
    if (toks.size() != 2) r.fail("malformed header, expected `I R`");
    const std::size_t dim = parse_count(r, toks[0], "I");
    const std::size_t rank = parse_count(r, toks[1], "R");
    std::vector<Vector> vs;
    for (std::size_t k = 0; k < rank; ++k) {
        const auto line = r.next();
        if (!line)
            r.fail_at(r.line_number() + 1, "unexpected end of file: missing factor " +
                                               std::to_string(k + 1) + " of " + std::to_string(rank));
        vs.push_back(text::parse_row(r, *line, dim));
    }
    expect_eof(r);
    return FactorSet(dim, std::move(vs));
}

void write_factors(std::ostream& os, const FactorSet& f) {
    os << f.dim() << ' ' << f.rank() << '\n';
    for (std::size_t k = 0; k < f.rank(); ++k) write_row(os, f.component(k));
}

FactorSet load_factors(const fs::path& path) {
    auto is = open_in(path);
    return read_factors(is, path.string());
}

void save_factors(const FactorSet& f, const fs::path& path) {
    auto os = open_out(path);
    write_factors(os, f);
    if (!os) fail_data("write failed for '" + path.string() + "'");
}

StackedBandTensor read_stacked(std::istream& is, const std::string& source) {
    text::LineReader r(is, source);
    const auto header = r.next();
    if (!header) r.fail("empty file, expected header `I F`");
    const auto toks = text::split_ws(*header);
    if (toks.size() != 2) r.fail("malformed header, expected `I F`");
    StackedBandTensor t;
    t.dim = parse_count(r, toks[0], "I");
    const std::size_t freqs = parse_count(r, toks[1], "F");
    t.slices.reserve(freqs);
    for (std::size_t f = 0; f < freqs; ++f)
        t.slices.emplace_back(t.dim,
                              read_square_block(r, t.dim, "block " + std::to_string(f + 1) + " "));
    expect_eof(r);
    return t;
}

void write_stacked(std::ostream& os, const StackedBandTensor& t) {
    os << t.dim << ' ' << t.num_freqs() << '\n';
    for (const auto& s : t.slices)
        for (std::size_t i = 0; i < t.dim; ++i) write_row(os, s.row(i));
}

StackedBandTensor load_stacked(const fs::path& path) {
    auto is = open_in(path);
    return read_stacked(is, path.string());
}

const std::vector<BandSpec>& builtin_bands() {
    static const std::vector<BandSpec> bands = {
        {"delta", 1, 3}, {"theta", 4, 7}, {"alpha", 8, 12}, {"beta", 13, 30}, {"all", 1, 30},
    };
    return bands;
}

BandSpec band_by_name(std::string_view name) {
    const std::string key = lower(name);
    for (const auto& b : builtin_bands())
        if (b.name == key) return b;
    fail_usage("unknown band '" + std::string(name) +
               "'; expected one of Delta, Theta, Alpha, Beta, All");
}

SymmetricMatrix band_average(const StackedBandTensor& t, const BandSpec& band) {
    if (band.lo_hz < 1 || band.hi_hz < band.lo_hz)
        fail_usage("band '" + band.name + "' has invalid bounds");
    if (static_cast<std::size_t>(band.hi_hz) > t.num_freqs())
        fail_data("band '" + band.name + "' needs " + std::to_string(band.hi_hz) +
                  " Hz but the tensor has " + std::to_string(t.num_freqs()) + " frequencies");
    const std::size_t n = t.dim;
    std::vector<double> sum(n * n, 0.0);
    for (int f = band.lo_hz; f <= band.hi_hz; ++f) {
        const auto& v = t.slices[static_cast<std::size_t>(f - 1)].values();
        for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += v[k];
    }
    const auto count = static_cast<double>(band.hi_hz - band.lo_hz + 1);
    for (double& v : sum) v /= count;
    return SymmetricMatrix(n, std::move(sum));
}

std::string_view group_name(Group g) { return g == Group::train ? "train" : "test"; }

std::vector<ManifestRow> SampleManifest::select(Group g) const {
    std::vector<ManifestRow> out;
    for (const auto& r : rows)
        if (r.group == g) out.push_back(r);
    return out;
}

std::vector<std::string> SampleManifest::labels() const {
    std::vector<std::string> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r.label);
    return out;
}

SampleManifest read_manifest(std::istream& is, const fs::path& base_dir, const std::string& source,
                             const ManifestOptions& opts) {
    text::LineReader r(is, source, false);
    auto header = r.next();
    while (header && text::trim(*header).empty()) header = r.next();
    if (!header) r.fail("empty manifest, expected header `path,label,group`");
    const auto cols = split_csv(*header);
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < cols.size(); ++i) {
        const std::string key = lower(cols[i]);
        if (!col.emplace(key, i).second) r.fail("duplicate column '" + cols[i] + "'");
    }
    for (const char* needed : {"path", "label", "group"}) {
        if (col.count(needed)) continue;
        const std::string n = needed;
        if ((n == "label" && opts.label_optional) || (n == "group" && opts.group_optional)) continue;
        r.fail("missing column '" + n + "' (header must name path,label,group)");
    }

    SampleManifest m;
    std::set<fs::path> seen;
    while (const auto line = r.next()) {
        if (text::trim(*line).empty()) continue;
        const auto fields = split_csv(*line);
        if (fields.size() != cols.size())
            r.fail("expected " + std::to_string(cols.size()) + " fields, found " +
                   std::to_string(fields.size()));
        ManifestRow row;
        const std::string& p = fields[col["path"]];
        if (p.empty()) r.fail("empty path");
        row.path = fs::path(p).is_absolute() ? fs::path(p) : (base_dir / p);
        row.path = row.path.lexically_normal();
        row.listed = p;
        if (!seen.insert(row.path).second) r.fail("duplicate path '" + p + "'");
        if (col.count("label")) {
            row.label = fields[col["label"]];
            if (row.label.empty() && !opts.label_optional) r.fail("empty label");
            if (row.label.find_first_of(" \t") != std::string::npos)
                r.fail("label '" + row.label + "' contains whitespace");
        }
        if (col.count("group")) {
            const std::string g = lower(fields[col["group"]]);
            if (g == "train")
                row.group = Group::train;
            else if (g == "test")
                row.group = Group::test;
            else
                r.fail("unknown group '" + fields[col["group"]] + "'; allowed values: train, test");
        }
        m.rows.push_back(std::move(row));
    }
    if (m.rows.empty()) r.fail("manifest has no rows");
    return m;
}

SampleManifest load_manifest(const fs::path& path, const ManifestOptions& opts) {
    auto is = open_in(path);
    return read_manifest(is, path.parent_path(), path.string(), opts);
}

void write_manifest(std::ostream& os, const SampleManifest& m, const fs::path& base_dir) {
    os << "path,label,group\n";
    const fs::path base = base_dir.lexically_normal();
    for (const auto& row : m.rows) {
        fs::path p = row.path.lexically_normal();
        const fs::path rel = p.lexically_relative(base);
        if (!rel.empty() && *rel.begin() != "..") p = rel;
        os << p.generic_string() << ',' << row.label << ',' << group_name(row.group) << '\n';
    }
}

void save_manifest(const SampleManifest& m, const fs::path& path) {
    auto os = open_out(path);
    write_manifest(os, m, path.parent_path());
    if (!os) fail_data("write failed for '" + path.string() + "'");
}

void SyntheticConfig::validate() const {
    if (num_classes < 1 || dim < 1 || template_rank < 1)
        fail_usage("synthetic config: classes, dim and template rank must be positive");
    if (train_per_class < 1 || test_per_class < 1)
        fail_usage("synthetic config: per-class sample counts must be positive");
    if (!(noise_sigma >= 0.0)) fail_usage("synthetic config: noise sigma must be >= 0");
}

SyntheticDataset generate_synthetic(const SyntheticConfig& cfg) {
    cfg.validate();
    const std::size_t n = cfg.dim;
    const std::size_t r0 = cfg.template_rank;
    Rng rng(cfg.seed);
    SyntheticDataset ds;

    for (std::size_t c = 0; c < cfg.num_classes; ++c) {
        std::vector<double> b(n * r0);
        for (double& v : b) v = rng.normal();
        std::vector<double> t(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                double s = 0.0;
                for (std::size_t k = 0; k < r0; ++k) s += b[i * r0 + k] * b[j * r0 + k];
                t[i * n + j] = s;
            }
        ds.templates.emplace_back(n, std::move(t));
    }

    auto draw = [&](std::size_t c) {
        std::vector<double> e(n * n);
        for (double& v : e) v = rng.normal();
        std::vector<double> x = ds.templates[c].values();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                x[i * n + j] += cfg.noise_sigma * (0.5 * (e[i * n + j] + e[j * n + i]));
        return SymmetricMatrix(n, std::move(x));
    };
    auto name = [](const char* split, std::size_t c, std::size_t s) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%s_c%zu_%03zu", split, c, s);
        return std::string(buf);
    };

    for (std::size_t c = 0; c < cfg.num_classes; ++c)
        for (std::size_t s = 0; s < cfg.train_per_class; ++s)
            ds.train.push_back({name("train", c, s), "c" + std::to_string(c), draw(c)});
    for (std::size_t c = 0; c < cfg.num_classes; ++c)
        for (std::size_t s = 0; s < cfg.test_per_class; ++s)
            ds.test.push_back({name("test", c, s), "c" + std::to_string(c), draw(c)});
    return ds;
}

void write_synthetic(const SyntheticDataset& ds, const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir / "matrices", ec);
    if (ec) fail_data("cannot create output directory '" + dir.string() + "': " + ec.message());
    auto emit = [&](const std::vector<SyntheticSample>& samples, Group g, const char* file) {
        SampleManifest m;
        for (const auto& s : samples) {
            const fs::path p = dir / "matrices" / (s.name + ".txt");
            save_matrix(s.matrix, p);
            m.rows.push_back({p, s.label, g});
        }
        save_manifest(m, dir / file);
    };
    emit(ds.train, Group::train, "train.csv");
    emit(ds.test, Group::test, "test.csv");
}

}  // namespace ssgk
