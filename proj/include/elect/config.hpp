#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "elect/grid.hpp"
#include "elect/harness.hpp"

namespace elect {

/// Run configuration shared by the meta-train, select and evaluate commands.
struct RunConfig {
  GridSpec grid = default_grid();
  HarnessConfig harness;
  AcquisitionKind acquisition = AcquisitionKind::EI;
  std::optional<std::uint64_t> seed;  // unset: fall back to ELECT_SEED, then 0
};

// Keys (all optional): grid (path relative to the config file, or an inline
// grid object), t, init_size, patience, budget, trials, seed, acquisition
// (ei|sum|greedy), coverage (strict|loose), init (coverage|random),
// fixed_model, cv_folds, cv_model_sample, anchor_search {max_anchors,
// k_folds, min_relative_improvement, model_sample, candidate_sample, screening}, predictor_grid [...].
// GBT settings use n_trees, max_depth, learning_rate, min_leaf, subsample, seed.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {},
                       const std::string& source = "<config>");
RunConfig load_config(const std::filesystem::path& file);

// Explicit value, else ELECT_SEED, else 0. Throws on a malformed ELECT_SEED.
std::uint64_t resolve_seed(std::optional<std::uint64_t> explicit_seed);

}  // namespace elect
