#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace elect {

enum class GapSource { GroundTruth, Predicted };

/// Pairwise performance gaps over a model subset. Pairs (j, j') have j < j'
/// and are sorted lexicographically; gaps[p] = perf[j] - perf[j'].
struct GapTable {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<double> gaps;
  GapSource source = GapSource::GroundTruth;
};

// Sorted, duplicate-free pair list over the given model indices.
std::vector<std::pair<std::size_t, std::size_t>> subset_pairs(std::span<const std::size_t> subset);

GapTable ground_truth_gaps(std::span<const double> performance,
                           std::span<const std::size_t> subset);
GapTable ground_truth_gaps(std::span<const double> performance,
                           const std::vector<std::pair<std::size_t, std::size_t>>& pairs);

// Weighted Kendall tau between two gap tables over the same pairs. Per pair:
// w = 1 when both gaps are zero, otherwise the smaller-magnitude gap divided
// by the larger one. Returns sum(w) / sum(|w|), or 0 when every w is 0.
double weighted_kendall_tau(std::span<const double> gaps_a, std::span<const double> gaps_b);
double weighted_kendall_tau(const GapTable& a, const GapTable& b);

// Similarity between predicted gaps on a new task and the true gaps of one
// meta-train task (its performance row) over the same pairs.
double tau_to_meta_task(const GapTable& predicted, std::span<const double> performance_row);

/// The t most similar meta-train tasks.
struct NeighborSet {
  std::vector<std::size_t> indices;  // rows of the performance matrix
  std::vector<std::string> dataset_ids;
  std::vector<double> similarities;  // descending

  bool operator==(const NeighborSet&) const = default;
};

// Ties break by ascending dataset id (lexicographic).
NeighborSet top_t_neighbors(std::span<const double> taus, std::span<const std::string> ids,
                            std::size_t t);

}  // namespace elect
