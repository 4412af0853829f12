#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "elect/core.hpp"

namespace elect {

enum class OutlierKind { Global, Local, Clustered };
inline constexpr OutlierKind kAllOutlierKinds[] = {OutlierKind::Global, OutlierKind::Local,
                                                   OutlierKind::Clustered};

std::string_view outlier_kind_name(OutlierKind k);
OutlierKind parse_outlier_kind(std::string_view name);

struct InjectionSpec {
  OutlierKind kind = OutlierKind::Global;
  double rate = 0.05;  // in (0, 0.2]
  std::uint64_t seed = 0;
};

inline constexpr std::size_t kMinInliers = 50;
inline constexpr std::size_t kMinInjected = 5;
inline constexpr double kCovarianceInflation = 4.0;
inline constexpr double kClusterShrink = 0.1;
inline constexpr double kRejectionQuantile = 0.9;
inline constexpr std::size_t kMaxRejectionAttempts = 10000;

// Number of outliers appended to r inliers: ceil(rate * r).
std::size_t injected_count(std::size_t inliers, double rate);

// Appends injected outliers (label 1) after the inliers (label 0).
//   global:    uniform in the per-feature box widened by 10% of its range
//   local:     N(mean, 4 cov) draws outside the 0.9-quantile Mahalanobis ball
//   clustered: one center drawn as for local, then N(center, 0.1 cov)
// The ball radius is the 0.9 quantile of the inliers' own Mahalanobis distances.
Dataset inject_outliers(const Matrix& inliers, const InjectionSpec& spec, const std::string& id);

// Three injected datasets per motherset, ids "<motherset>__<kind>". Labeled
// mothersets keep only their label-0 rows.
std::vector<Dataset> make_controlled_testbed(const std::vector<Dataset>& mothersets,
                                             std::uint64_t seed);

// Seeded Gaussian-mixture mothersets (unlabeled), ids "synth_00", "synth_01", ...
std::vector<Dataset> synthetic_mothersets(std::size_t count, std::uint64_t seed);

struct TestbedEntry {
  std::string id;
  std::filesystem::path path;  // relative to the manifest directory
  std::string motherset;       // empty for wild datasets
  bool labeled = true;
  std::optional<InjectionSpec> injection;
};

struct TestbedManifest {
  std::vector<TestbedEntry> datasets;
};

// {"datasets": [{"id", "path", "labeled", "motherset", "injection": {...}}]}
TestbedManifest read_manifest(const std::filesystem::path& file);
void write_manifest(const TestbedManifest& manifest, const std::filesystem::path& file);
// Loads every dataset, resolving paths against the manifest directory.
std::vector<Dataset> load_manifest_datasets(const std::filesystem::path& file);
// Saves datasets as CSVs under `dir` and writes dir/manifest.json.
TestbedManifest save_testbed(const std::vector<Dataset>& datasets, const std::filesystem::path& dir,
                             const std::vector<TestbedEntry>& lineage = {});

}  // namespace elect
