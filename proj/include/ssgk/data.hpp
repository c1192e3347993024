#pragma once

// File formats, frequency-band averaging and the synthetic connectome
// generator.
//
// Matrix file:   line 1 `I`, then I lines of I decimals.
// Stacked file:  line 1 `I F`, then F blocks of I lines of I decimals;
//                block f holds frequency f Hz (1-based).
// Factor file:   line 1 `I R`, then R lines of I decimals (one a_r per line).
// Manifest CSV:  header naming the columns `path,label,group`.
//
// Lines starting with '#' and blank lines are ignored in the numeric formats.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ssgk/core.hpp"

namespace ssgk {

[[nodiscard]] SymmetricMatrix read_matrix(std::istream& is, const std::string& source = "<matrix>");
void write_matrix(std::ostream& os, const SymmetricMatrix& x);
[[nodiscard]] SymmetricMatrix load_matrix(const std::filesystem::path& path);
void save_matrix(const SymmetricMatrix& x, const std::filesystem::path& path);

[[nodiscard]] FactorSet read_factors(std::istream& is, const std::string& source = "<factors>");
void write_factors(std::ostream& os, const FactorSet& f);
[[nodiscard]] FactorSet load_factors(const std::filesystem::path& path);
void save_factors(const FactorSet& f, const std::filesystem::path& path);

struct StackedBandTensor {
    std::size_t dim = 0;
    std::vector<SymmetricMatrix> slices;  // slices[f] is frequency f+1 Hz

    [[nodiscard]] std::size_t num_freqs() const noexcept { return slices.size(); }
};

[[nodiscard]] StackedBandTensor read_stacked(std::istream& is,
                                             const std::string& source = "<stacked>");
void write_stacked(std::ostream& os, const StackedBandTensor& t);
[[nodiscard]] StackedBandTensor load_stacked(const std::filesystem::path& path);

struct BandSpec {
    std::string name;
    int lo_hz = 1;
    int hi_hz = 1;  // inclusive
};

// Delta(1,3) Theta(4,7) Alpha(8,12) Beta(13,30) All(1,30)
[[nodiscard]] const std::vector<BandSpec>& builtin_bands();
// Case-insensitive lookup; unknown names are a usage error listing the built-ins.
[[nodiscard]] BandSpec band_by_name(std::string_view name);

// Elementwise mean of slices lo..hi (1-based, inclusive): sum in frequency
// order, then divide by the slice count.
[[nodiscard]] SymmetricMatrix band_average(const StackedBandTensor& t, const BandSpec& band);

enum class Group { train, test };
[[nodiscard]] std::string_view group_name(Group g);

struct ManifestRow {
    std::filesystem::path path;  // resolved against the manifest's directory
    std::string label;  // may be empty only when loaded with labels optional
    Group group = Group::train;
    std::string listed = {};  // path column as written; empty when not read from a manifest

    // Name for reports: the listed form when known, so outputs do not depend on
    // where the dataset lives.
    [[nodiscard]] std::string display() const { return listed.empty() ? path.generic_string() : listed; }
};

struct SampleManifest {
    std::vector<ManifestRow> rows;

    [[nodiscard]] std::vector<ManifestRow> select(Group g) const;
    [[nodiscard]] std::vector<std::string> labels() const;
};

struct ManifestOptions {
    bool label_optional = false;  // allow a missing `label` column
    bool group_optional = false;  // missing `group` column means train
};

// Relative paths are resolved against the manifest's directory.
[[nodiscard]] SampleManifest read_manifest(std::istream& is, const std::filesystem::path& base_dir,
                                           const std::string& source = "<manifest>",
                                           const ManifestOptions& opts = {});
[[nodiscard]] SampleManifest load_manifest(const std::filesystem::path& path,
                                           const ManifestOptions& opts = {});
// Paths are written relative to `base_dir` when they live below it.
void write_manifest(std::ostream& os, const SampleManifest& m, const std::filesystem::path& base_dir);
void save_manifest(const SampleManifest& m, const std::filesystem::path& path);

struct SyntheticConfig {
    std::size_t num_classes = 3;
    std::size_t dim = 16;
    std::size_t template_rank = 3;
    double noise_sigma = 0.2;
    std::size_t train_per_class = 20;
    std::size_t test_per_class = 10;
    std::uint64_t seed = 7;

    void validate() const;
};

struct SyntheticSample {
    std::string name;   // e.g. "train_c1_007"
    std::string label;  // "c0", "c1", ...
    SymmetricMatrix matrix;
};

struct SyntheticDataset {
    std::vector<SymmetricMatrix> templates;
    std::vector<SyntheticSample> train;
    std::vector<SyntheticSample> test;
};

// Draw order on one mt19937_64 stream: every template B_c (I x R0, row-major)
// for c = 0..K-1, then the train samples class by class, then the test
// samples class by class. Each sample is T_c + sigma (E + E^T)/2 with E an
// I x I standard-normal matrix drawn row-major.
[[nodiscard]] SyntheticDataset generate_synthetic(const SyntheticConfig& cfg);

// Writes <dir>/matrices/<name>.txt plus <dir>/train.csv and <dir>/test.csv.
void write_synthetic(const SyntheticDataset& ds, const std::filesystem::path& dir);

}  // namespace ssgk
