#include "elect/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "elect/core.hpp"

namespace elect {

std::vector<std::pair<std::size_t, std::size_t>> subset_pairs(
    std::span<const std::size_t> subset) {
  std::vector<std::size_t> s(subset.begin(), subset.end());
  std::sort(s.begin(), s.end());
  if (std::adjacent_find(s.begin(), s.end()) != s.end())
    throw ValidationError("model subset contains duplicates");
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(s.size() * (s.size() - (s.empty() ? 0 : 1)) / 2);
  for (std::size_t a = 0; a < s.size(); ++a)
    for (std::size_t b = a + 1; b < s.size(); ++b) pairs.emplace_back(s[a], s[b]);
  return pairs;
}

GapTable ground_truth_gaps(std::span<const double> performance,
                           const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  GapTable t{pairs, {}, GapSource::GroundTruth};
  t.gaps.reserve(pairs.size());
  for (const auto& [j, k] : pairs) {
    if (j >= performance.size() || k >= performance.size())
      throw ValidationError("gap table: model index out of range");
    t.gaps.push_back(performance[j] - performance[k]);
  }
  return t;
}

GapTable ground_truth_gaps(std::span<const double> performance,
                           std::span<const std::size_t> subset) {
  return ground_truth_gaps(performance, subset_pairs(subset));
}

double weighted_kendall_tau(std::span<const double> gaps_a, std::span<const double> gaps_b) {
  if (gaps_a.size() != gaps_b.size())
    throw ValidationError("weighted_kendall_tau: gap tables differ in length");
  double num = 0.0, den = 0.0;
  for (std::size_t p = 0; p < gaps_a.size(); ++p) {
    const double a = gaps_a[p], b = gaps_b[p];
    double w;
    if (a == 0.0 && b == 0.0) w = 1.0;
    else if (std::fabs(a) <= std::fabs(b)) w = a / b;
    else w = b / a;
    num += w;
    den += std::fabs(w);
  }
  return den > 0.0 ? num / den : 0.0;
}

double weighted_kendall_tau(const GapTable& a, const GapTable& b) {
  if (a.pairs != b.pairs) throw ValidationError("weighted_kendall_tau: pair lists differ");
  return weighted_kendall_tau(a.gaps, b.gaps);
}

double tau_to_meta_task(const GapTable& predicted, std::span<const double> performance_row) {
  return weighted_kendall_tau(predicted, ground_truth_gaps(performance_row, predicted.pairs));
}

NeighborSet top_t_neighbors(std::span<const double> taus, std::span<const std::string> ids,
                            std::size_t t) {
  if (taus.size() != ids.size()) throw ValidationError("top_t_neighbors: ids/taus mismatch");
  if (t == 0 || t > taus.size())
    throw ValidationError("top_t_neighbors: t = " + std::to_string(t) + " outside 1.." +
                          std::to_string(taus.size()));
  std::vector<std::size_t> order(taus.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (taus[a] != taus[b]) return taus[a] > taus[b];
    return ids[a] < ids[b];
  });
  NeighborSet n;
  for (std::size_t i = 0; i < t; ++i) {
    n.indices.push_back(order[i]);
    n.dataset_ids.push_back(ids[order[i]]);
    n.similarities.push_back(taus[order[i]]);
  }
  return n;
}

}  // namespace elect
