#include <algorithm>
#include <cmath>
#include <numeric>

#include "elect/core.hpp"
#include "elect/metrics.hpp"

namespace elect {

namespace {

// Exact null distribution of 2*W+ over all 2^n sign assignments of the
// (doubled, hence integral) midranks.
double exact_two_sided(const std::vector<long>& doubled_ranks, long doubled_w_plus) {
  long total = std::accumulate(doubled_ranks.begin(), doubled_ranks.end(), 0L);
  std::vector<double> count(static_cast<std::size_t>(total) + 1, 0.0);
  count[0] = 1.0;
  long reach = 0;
  for (long r : doubled_ranks) {
    for (long s = reach; s >= 0; --s)
      if (count[static_cast<std::size_t>(s)] != 0.0)
        count[static_cast<std::size_t>(s + r)] += count[static_cast<std::size_t>(s)];
    reach += r;
  }
  const double all = std::ldexp(1.0, static_cast<int>(doubled_ranks.size()));
  double lower = 0.0, upper = 0.0;
  for (long s = 0; s <= total; ++s) {
    if (s <= doubled_w_plus) lower += count[static_cast<std::size_t>(s)];
    if (s >= doubled_w_plus) upper += count[static_cast<std::size_t>(s)];
  }
  return std::min(1.0, 2.0 * std::min(lower, upper) / all);
}

}  // namespace

WilcoxonResult wilcoxon_signed_rank(std::span<const std::pair<double, double>> pairs,
                                    WilcoxonMethod method) {
  std::vector<double> diffs;
  for (const auto& [a, b] : pairs)
    if (a - b != 0.0) diffs.push_back(a - b);
  const std::size_t n = diffs.size();
  if (n < kWilcoxonMinPairs)
    throw ValidationError("wilcoxon: need at least 5 non-zero differences, got " +
                          std::to_string(n));

  std::vector<double> magnitude(n);
  for (std::size_t i = 0; i < n; ++i) magnitude[i] = std::fabs(diffs[i]);
  // Ascending midranks of |d|.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return magnitude[a] < magnitude[b]; });
  std::vector<double> rank(n);
  double tie_term = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && magnitude[order[j + 1]] == magnitude[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) rank[order[t]] = avg;
    const double t_size = static_cast<double>(j - i + 1);
    tie_term += t_size * t_size * t_size - t_size;
    i = j + 1;
  }

  WilcoxonResult res;
  res.n_used = n;
  double w_minus = 0.0;
  for (std::size_t i = 0; i < n; ++i) (diffs[i] > 0 ? res.statistic : w_minus) += rank[i];
  res.effect = res.statistic - w_minus;

  const bool exact = method == WilcoxonMethod::Exact ||
                     (method == WilcoxonMethod::Auto && n <= kWilcoxonExactMax);
  res.exact = exact;
  if (exact) {
    std::vector<long> doubled(n);
    for (std::size_t i = 0; i < n; ++i) doubled[i] = std::lround(2.0 * rank[i]);
    res.p_value = exact_two_sided(doubled, std::lround(2.0 * res.statistic));
  } else {
    const double nn = static_cast<double>(n);
    const double mu = nn * (nn + 1.0) / 4.0;
    const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0;
    const double dev = std::max(std::fabs(res.statistic - mu) - 0.5, 0.0);
    res.p_value = var > 0.0 ? std::min(1.0, std::erfc(dev / std::sqrt(2.0 * var))) : 1.0;
  }
  return res;
}

}  // namespace elect
