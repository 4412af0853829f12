#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace elect {

/// Label-free internal performance measures of one model on one dataset,
/// computed against the consensus of an anchor set.
struct IpmVector {
  double mc = 0.0;      // mean Kendall tau-b to the anchors
  double select = 0.0;  // Pearson correlation to the anchor consensus
  double hits = 0.0;    // hub score in the model x sample bipartite graph

  bool operator==(const IpmVector&) const = default;
};

// O(r log r) Kendall tau-b; 0 when either side is constant.
double kendall_tau_b(std::span<const double> a, std::span<const double> b);
// 0 when either side is constant.
double pearson(std::span<const double> a, std::span<const double> b);

inline constexpr double kHitsTolerance = 1e-9;
inline constexpr int kHitsMaxIterations = 100;

using ScoreRows = std::span<const std::vector<double>>;

double mc_score(std::span<const double> target, ScoreRows anchors);
double select_score(std::span<const double> target, ScoreRows anchors);
double hits_score(std::span<const double> target, ScoreRows anchors);

struct HitsResult {
  std::vector<double> hubs;  // one per row, unit L2 norm (or all zero)
  int iterations = 0;
  double last_change = 0.0;
};
// Hub scores of every row of the bipartite graph with min-max normalized
// edge weights. Power iteration h = W a, a = W^T h from a uniform authority
// vector, run on the row Gram matrix W W^T.
HitsResult hits_hubs(ScoreRows rows);

/// Per-dataset anchor artifacts reused across every model whose IPMs are
/// computed on that dataset. Adding a model costs only its own score vector.
class AnchorContext {
 public:
  AnchorContext() = default;
  explicit AnchorContext(std::vector<std::vector<double>> anchor_scores);

  std::size_t size() const { return raw_.size(); }
  const std::vector<double>& anchor(std::size_t a) const { return raw_[a]; }
  std::size_t samples() const { return samples_; }

  // IPMs of `target`. `exclude` drops one anchor (used when the target is
  // itself an anchor). `taus`, when given, supplies precomputed tau-b values
  // between the target and each anchor in anchor order.
  IpmVector compute(std::span<const double> target, std::optional<std::size_t> exclude = {},
                    std::optional<std::span<const double>> taus = {}) const;

 private:
  std::vector<std::vector<double>> raw_;
  std::vector<std::vector<double>> z_;
  std::vector<std::vector<double>> minmax_;
  std::vector<double> row_sums_;
  std::vector<double> gram_;  // anchors x anchors
  std::size_t samples_ = 0;
};

// IPMs of a target against anchors. When `target_anchor` names an anchor
// slot the target is excluded from its own consensus; with no remaining
// anchors all measures are 0.
IpmVector compute_ipms(const AnchorContext& anchors, std::span<const double> target,
                       std::optional<std::size_t> target_anchor = {});

}  // namespace elect
