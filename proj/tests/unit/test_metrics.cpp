#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "../oracles.hpp"
#include "elect/core.hpp"
#include "elect/metrics.hpp"
#include "elect/rng.hpp"

using namespace elect;
using namespace oracle;

TEST_CASE("average precision hand examples") {
  const std::vector<double> s{0.9, 0.8, 0.7, 0.6};
  const std::vector<std::uint8_t> y{1, 0, 1, 0};
  CHECK(average_precision(s, y) == doctest::Approx(0.5 * (1.0 + 2.0 / 3.0)).epsilon(1e-15));
  const std::vector<std::uint8_t> perfect{1, 1, 0, 0};
  CHECK(average_precision(s, perfect) == 1.0);
  const std::vector<std::uint8_t> all{1, 1, 1, 1};
  CHECK(average_precision(s, all) == 1.0);
  const std::vector<std::uint8_t> none{0, 0, 0, 0};
  CHECK_THROWS_AS(average_precision(s, none), ValidationError);
  const std::vector<std::uint8_t> short_labels{1, 0};
  CHECK_THROWS_AS(average_precision(s, short_labels), ValidationError);
}

TEST_CASE("average precision breaks ties by sample index") {
  const std::vector<double> s{0.5, 0.5, 0.5};
  // Ranked list is 0, 1, 2: the positive at index 2 sits at rank 3.
  const std::vector<std::uint8_t> y{0, 0, 1};
  CHECK(average_precision(s, y) == doctest::Approx(1.0 / 3.0));
  const std::vector<std::uint8_t> first{1, 0, 0};
  CHECK(average_precision(s, first) == 1.0);
}

TEST_CASE("average precision is invariant to monotone transforms") {
  Rng rng(4);
  std::vector<double> s(60);
  std::vector<std::uint8_t> y(60);
  for (std::size_t i = 0; i < 60; ++i) {
    s[i] = rng.normal();
    y[i] = rng.uniform() < 0.2 ? 1 : 0;
  }
  y[0] = 1;
  std::vector<double> t(s.size());
  std::transform(s.begin(), s.end(), t.begin(), [](double v) { return std::exp(3.0 * v) + 7.0; });
  CHECK(average_precision(s, y) == average_precision(t, y));
}

TEST_CASE("AP rank with fractional ties") {
  const std::vector<double> a{0.9, 0.5, 0.1};
  CHECK(ap_rank(a, 0) == 1.0);
  const std::vector<double> b{0.9, 0.5, 0.5, 0.1};
  CHECK(ap_rank(b, 1) == 2.5);
  CHECK(ap_rank(b, 2) == 2.5);
  const std::vector<double> flat(7, 0.3);
  CHECK(ap_rank(flat, 4) == 4.0);
  Rng rng(9);
  std::vector<double> c(25);
  for (auto& v : c) v = std::round(rng.uniform() * 6.0) / 6.0;
  double sum = 0.0;
  for (std::size_t j = 0; j < c.size(); ++j) sum += ap_rank(c, j);
  CHECK(sum == doctest::Approx(25.0 * 26.0 / 2.0));
}

TEST_CASE("virtual rank places a foreign AP among the models") {
  const std::vector<double> a{0.9, 0.5, 0.1};
  CHECK(virtual_rank(a, 0.95) == 1.0);
  CHECK(virtual_rank(a, 0.5) == 2.5);
  CHECK(virtual_rank(a, 0.3) == 3.0);
  CHECK(virtual_rank(a, 0.0) == 3.0);
}

TEST_CASE("Wilcoxon all-wins case is exact") {
  std::vector<std::pair<double, double>> p;
  for (int i = 1; i <= 8; ++i) p.emplace_back(10.0 + i, 0.0);
  const auto r = wilcoxon_signed_rank(p);
  CHECK(r.exact);
  CHECK(r.p_value == 0.0078125);
  CHECK(r.statistic == 36.0);
  CHECK(r.effect > 0);
}

TEST_CASE("Wilcoxon exact branch matches enumeration") {
  Rng rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 5 + trial % 8;
    std::vector<std::pair<double, double>> p;
    for (std::size_t i = 0; i < n; ++i) {
      // Coarse values force ties and occasional zero differences.
      const double a = std::round(rng.uniform() * 5.0);
      const double b = std::round(rng.uniform() * 5.0);
      p.emplace_back(a, b);
    }
    std::size_t nonzero = 0;
    for (auto [a, b] : p) nonzero += a != b;
    if (nonzero < kWilcoxonMinPairs) {
      CHECK_THROWS_AS(wilcoxon_signed_rank(p), ValidationError);
      continue;
    }
    CHECK(wilcoxon_signed_rank(p, WilcoxonMethod::Exact).p_value ==
          doctest::Approx(enumerated_p(p)).epsilon(1e-12));
  }
}

TEST_CASE("Wilcoxon preconditions and symmetry") {
  std::vector<std::pair<double, double>> p{{1, 1}, {2, 2}, {3, 1}, {4, 1}, {5, 1}, {6, 1}, {7, 7}};
  CHECK_THROWS_AS(wilcoxon_signed_rank(p), ValidationError);
  std::vector<std::pair<double, double>> q{{1, 0}, {2, 5}, {3, 0}, {4, 0}, {7, 1}, {0, 6}};
  std::vector<std::pair<double, double>> swapped;
  for (auto [a, b] : q) swapped.emplace_back(b, a);
  const auto x = wilcoxon_signed_rank(q);
  const auto y = wilcoxon_signed_rank(swapped);
  CHECK(x.p_value == y.p_value);
  CHECK(x.effect == -y.effect);
}

TEST_CASE("Wilcoxon exact and normal branches agree at n = 15") {
  Rng rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<std::pair<double, double>> p;
    for (int i = 0; i < 15; ++i) p.emplace_back(rng.normal() + 0.3 * (trial % 3), rng.normal());
    const double e = wilcoxon_signed_rank(p, WilcoxonMethod::Exact).p_value;
    const double a = wilcoxon_signed_rank(p, WilcoxonMethod::Normal).p_value;
    CHECK(std::fabs(e - a) <= 0.02);
  }
}

TEST_CASE("normal helpers") {
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(normal_cdf(1.0) == doctest::Approx(0.841345).epsilon(1e-6));
  CHECK(normal_pdf(1.0) == doctest::Approx(0.241971).epsilon(1e-6));
}
