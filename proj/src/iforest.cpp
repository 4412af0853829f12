#include <algorithm>
#include <cmath>
#include <numeric>

#include "elect/detectors.hpp"
#include "elect/rng.hpp"

namespace elect {

namespace {

constexpr double kEulerGamma = 0.5772156649015329;

// Average path length of an unsuccessful BST search over n points.
double average_path_length(std::size_t n) {
  if (n <= 1) return 0.0;
  if (n == 2) return 1.0;
  const double m = static_cast<double>(n - 1);
  return 2.0 * (std::log(m) + kEulerGamma) - 2.0 * m / static_cast<double>(n);
}

struct Node {
  int feature = -1;  // -1 marks a leaf
  double split = 0.0;
  int left = -1;
  int right = -1;
  std::size_t size = 0;
};

class IsolationTree {
 public:
  IsolationTree(const Matrix& x, std::vector<std::size_t> sample, int height_limit, Rng& rng)
      : x_(x), limit_(height_limit) {
    build(sample, 0, rng);
  }

  double path_length(std::span<const double> point) const {
    int node = 0;
    int depth = 0;
    while (nodes_[static_cast<std::size_t>(node)].feature >= 0) {
      const auto& n = nodes_[static_cast<std::size_t>(node)];
      node = point[static_cast<std::size_t>(n.feature)] < n.split ? n.left : n.right;
      ++depth;
    }
    return depth + average_path_length(nodes_[static_cast<std::size_t>(node)].size);
  }

 private:
  int build(std::vector<std::size_t>& idx, int depth, Rng& rng) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(Node{});
    nodes_.back().size = idx.size();
    if (idx.size() <= 1 || depth >= limit_) return id;

    std::vector<std::size_t> candidates;
    std::vector<double> lo(x_.cols()), hi(x_.cols());
    for (std::size_t f = 0; f < x_.cols(); ++f) {
      lo[f] = hi[f] = x_(idx[0], f);
      for (auto i : idx) {
        lo[f] = std::min(lo[f], x_(i, f));
        hi[f] = std::max(hi[f], x_(i, f));
      }
      if (hi[f] > lo[f]) candidates.push_back(f);
    }
    if (candidates.empty()) return id;
    const auto f = candidates[rng.below(candidates.size())];
    double split = rng.uniform(lo[f], hi[f]);
    if (split <= lo[f]) split = 0.5 * (lo[f] + hi[f]);

    std::vector<std::size_t> left, right;
    for (auto i : idx) (x_(i, f) < split ? left : right).push_back(i);
    const int l = build(left, depth + 1, rng);
    const int r = build(right, depth + 1, rng);
    auto& n = nodes_[static_cast<std::size_t>(id)];
    n.feature = static_cast<int>(f);
    n.split = split;
    n.left = l;
    n.right = r;
    return id;
  }

  const Matrix& x_;
  int limit_;
  std::vector<Node> nodes_;
};

}  // namespace

std::vector<double> iforest_scores(const Matrix& x, int n_trees, int subsample,
                                   std::uint64_t seed) {
  if (n_trees < 1) throw ValidationError("iforest: n_trees must be positive");
  if (subsample < 1) throw ValidationError("iforest: subsample must be positive");
  const std::size_t r = x.rows();
  const auto psi = static_cast<std::size_t>(subsample);
  if (psi > r)
    throw ValidationError("iforest: subsample " + std::to_string(psi) +
                          " exceeds the sample count " + std::to_string(r));
  const int limit = static_cast<int>(std::ceil(std::log2(std::max<double>(psi, 2.0))));
  Rng rng(seed);
  std::vector<double> depth_sum(r, 0.0);
  std::vector<std::size_t> perm(r);
  for (int t = 0; t < n_trees; ++t) {
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    // Partial Fisher-Yates: the first psi entries are a uniform subsample.
    for (std::size_t i = 0; i < psi; ++i) std::swap(perm[i], perm[i + rng.below(r - i)]);
    IsolationTree tree(x, std::vector<std::size_t>(perm.begin(), perm.begin() + static_cast<long>(psi)),
                       limit, rng);
    for (std::size_t i = 0; i < r; ++i) depth_sum[i] += tree.path_length(x.row(i));
  }
  const double norm = average_path_length(psi);
  std::vector<double> scores(r);
  for (std::size_t i = 0; i < r; ++i) {
    const double mean_depth = depth_sum[i] / n_trees;
    scores[i] = norm > 0.0 ? std::pow(2.0, -mean_depth / norm) : 1.0;
  }
  return scores;
}

}  // namespace elect
