#include "elect/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "elect/core.hpp"

namespace elect {

double average_precision(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size())
    throw ValidationError("average_precision: scores and labels differ in length");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::size_t hits = 0;
  double total = 0.0;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    if (labels[order[rank]]) {
      ++hits;
      total += static_cast<double>(hits) / static_cast<double>(rank + 1);
    }
  }
  if (hits == 0) throw ValidationError("average_precision: no positive labels");
  return total / static_cast<double>(hits);
}

std::vector<double> descending_ranks(std::span<const double> values) {
  const std::size_t m = values.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  std::vector<double> ranks(m);
  for (std::size_t i = 0; i < m;) {
    std::size_t j = i;
    while (j + 1 < m && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
    i = j + 1;
  }
  return ranks;
}

double ap_rank(std::span<const double> ap_all, std::size_t j) {
  if (j >= ap_all.size()) throw ValidationError("ap_rank: model index out of range");
  std::size_t better = 0, equal = 0;
  for (double v : ap_all) {
    if (v > ap_all[j]) ++better;
    else if (v == ap_all[j]) ++equal;
  }
  // Positions better+1 .. better+equal, averaged.
  return static_cast<double>(better) + 0.5 * static_cast<double>(equal + 1);
}

double virtual_rank(std::span<const double> ap_all, double ap) {
  std::size_t better = 0, equal = 0;
  for (double v : ap_all) {
    if (v > ap) ++better;
    else if (v == ap) ++equal;
  }
  double rank = 1.0 + static_cast<double>(better) + 0.5 * static_cast<double>(equal);
  return std::clamp(rank, 1.0, static_cast<double>(std::max<std::size_t>(ap_all.size(), 1)));
}

double normal_cdf(double u) { return 0.5 * std::erfc(-u / std::sqrt(2.0)); }

double normal_pdf(double u) {
  constexpr double kInvSqrt2Pi = 0.39894228040143267794;
  return kInvSqrt2Pi * std::exp(-0.5 * u * u);
}

}  // namespace elect
