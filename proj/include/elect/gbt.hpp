#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "elect/core.hpp"

namespace elect {

struct GbtParams {
  int n_trees = 200;
  int max_depth = 4;
  double learning_rate = 0.05;
  int min_leaf = 20;
  // Fraction of rows drawn (without replacement) per tree; 1 uses all rows
  // and makes `seed` irrelevant.
  double subsample = 1.0;
  std::uint64_t seed = 0;

  bool operator==(const GbtParams&) const = default;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;

  bool operator==(const TreeNode&) const = default;
};

/// Axis-aligned regression tree; x[feature] <= threshold goes left.
struct RegressionTree {
  std::vector<TreeNode> nodes;

  double predict(std::span<const double> x) const;
  int depth() const;
  bool operator==(const RegressionTree&) const = default;
};

/// Squared-error gradient-boosted trees:
/// prediction = base_score + learning_rate * sum of leaf values.
struct GbtModel {
  std::size_t n_features = 0;
  double base_score = 0.0;
  double learning_rate = 0.0;
  std::vector<RegressionTree> trees;

  double predict(std::span<const double> x) const;
  bool operator==(const GbtModel&) const = default;
};

// Exact greedy variance-reduction splits, grown level by level. Rows are put
// in a canonical (lexicographic) order first, so the result does not depend
// on the input order. Throws ValidationError with fewer than 2 rows.
GbtModel fit_gbt(const Matrix& features, std::span<const double> targets,
                 const GbtParams& params);

std::string gbt_to_json(const GbtModel& model);
GbtModel gbt_from_json(const std::string& text);

}  // namespace elect
