#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace elect {

// Average precision: mean, over positives in descending-score order, of the
// precision at each positive's rank. Score ties are broken by ascending
// sample index.
double average_precision(std::span<const double> scores, std::span<const std::uint8_t> labels);

// Fractional rank (1 = best) of every entry, descending; ties get the mean of
// the positions they occupy.
std::vector<double> descending_ranks(std::span<const double> values);

// Rank of model j (0-based) among all models by AP.
double ap_rank(std::span<const double> ap_all, std::size_t j);

// Position a foreign AP value would take among the m models: 1 + #better +
// #equal / 2, capped to [1, m].
double virtual_rank(std::span<const double> ap_all, double ap);

double normal_cdf(double u);
double normal_pdf(double u);

enum class WilcoxonMethod { Auto, Exact, Normal };

struct WilcoxonResult {
  double statistic = 0.0;  // W+, sum of ranks of positive differences a - b
  double p_value = 1.0;    // two-sided
  double effect = 0.0;     // W+ - W-; sign gives the direction of a vs b
  std::size_t n_used = 0;  // non-zero differences
  bool exact = false;
};

inline constexpr std::size_t kWilcoxonExactMax = 15;
inline constexpr std::size_t kWilcoxonMinPairs = 5;

// Paired signed-rank test on a_i - b_i. Zero differences are dropped; ties
// get midranks. Auto uses exact enumeration up to 15 non-zero differences and
// the tie- and continuity-corrected normal approximation above. Throws
// ValidationError with fewer than 5 non-zero differences.
WilcoxonResult wilcoxon_signed_rank(std::span<const std::pair<double, double>> pairs,
                                    WilcoxonMethod method = WilcoxonMethod::Auto);

}  // namespace elect
