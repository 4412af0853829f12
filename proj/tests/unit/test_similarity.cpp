#include <doctest.h>

#include <cmath>

#include "../oracles.hpp"
#include "elect/core.hpp"
#include "elect/rng.hpp"
#include "elect/similarity.hpp"

using namespace elect;
using namespace oracle;

TEST_CASE("weighted tau equals the literal definition") {
  Rng rng(2);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t m = 2 + static_cast<std::size_t>(trial % 9);
    std::vector<double> a(m), b(m);
    for (std::size_t j = 0; j < m; ++j) {
      a[j] = std::round(rng.uniform() * 8) / 8;
      b[j] = trial % 2 ? std::round(rng.uniform() * 8) / 8 : rng.uniform();
    }
    std::vector<std::size_t> all(m);
    for (std::size_t j = 0; j < m; ++j) all[j] = j;
    const auto ga = ground_truth_gaps(a, all), gb = ground_truth_gaps(b, all);
    CHECK(weighted_kendall_tau(ga, gb) == doctest::Approx(literal_tau(a, b)).epsilon(1e-14));
  }
}

TEST_CASE("weighted tau limits") {
  const std::vector<double> p{0.9, 0.4, 0.7, 0.1};
  std::vector<double> mirrored;
  for (double v : p) mirrored.push_back(1.0 - v);
  const std::vector<std::size_t> all{0, 1, 2, 3};
  const auto g = ground_truth_gaps(p, all);
  CHECK(weighted_kendall_tau(g, g) == 1.0);
  CHECK(weighted_kendall_tau(g, ground_truth_gaps(mirrored, all)) == -1.0);
  // Fully concordant orderings give 1 whatever the gap magnitudes.
  std::vector<double> squashed{0.9, 0.89, 0.895, 0.1};
  CHECK(weighted_kendall_tau(g, ground_truth_gaps(squashed, all)) == 1.0);
  // One discordant pair with a large weight.
  std::vector<double> swapped{0.4, 0.9, 0.7, 0.1};
  CHECK(weighted_kendall_tau(g, ground_truth_gaps(swapped, all)) ==
        doctest::Approx(literal_tau(p, swapped)));
  const std::vector<double> flat{0.5, 0.5, 0.5, 0.5};
  const std::vector<double> zeros{0.0, 0.0};
  const std::vector<double> some{0.1, 0.2};
  CHECK(weighted_kendall_tau(zeros, zeros) == 1.0);
  // Zero gaps against non-zero ones carry no weight at all.
  CHECK(weighted_kendall_tau(some, zeros) == 0.0);
  CHECK_THROWS_AS(weighted_kendall_tau(zeros, std::vector<double>{1.0}), ValidationError);
  CHECK(weighted_kendall_tau(ground_truth_gaps(flat, all), ground_truth_gaps(flat, all)) == 1.0);
}

TEST_CASE("subset pairs are sorted and reject duplicates") {
  const std::vector<std::size_t> s{4, 1, 7};
  const auto pairs = subset_pairs(s);
  REQUIRE(pairs.size() == 3);
  CHECK(pairs[0] == std::pair<std::size_t, std::size_t>{1, 4});
  CHECK(pairs[1] == std::pair<std::size_t, std::size_t>{1, 7});
  CHECK(pairs[2] == std::pair<std::size_t, std::size_t>{4, 7});
  const std::vector<std::size_t> dup{1, 1};
  CHECK_THROWS_AS(subset_pairs(dup), ValidationError);
  const std::vector<double> perf{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8};
  const auto g = ground_truth_gaps(perf, s);
  CHECK(g.gaps[0] == perf[1] - perf[4]);
  CHECK(tau_to_meta_task(g, perf) == 1.0);
}

TEST_CASE("top-t neighbors break ties by dataset id") {
  const std::vector<double> taus{0.5, 0.9, 0.5, 0.1};
  const std::vector<std::string> ids{"d", "b", "a", "c"};
  const auto n = top_t_neighbors(taus, ids, 3);
  CHECK(n.dataset_ids == std::vector<std::string>{"b", "a", "d"});
  CHECK(n.indices == std::vector<std::size_t>{1, 2, 0});
  CHECK(n.similarities == std::vector<double>{0.9, 0.5, 0.5});
  CHECK_THROWS_AS(top_t_neighbors(taus, ids, 0), ValidationError);
  CHECK_THROWS_AS(top_t_neighbors(taus, ids, 5), ValidationError);
}

TEST_CASE("weighted tau is symmetric and bounded") {
  Rng rng(77);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(trial % 12);
    std::vector<double> a(n), b(n);
    for (std::size_t p = 0; p < n; ++p) {
      a[p] = rng.uniform() < 0.2 ? 0.0 : rng.uniform() * 2 - 1;
      b[p] = rng.uniform() < 0.2 ? 0.0 : rng.uniform() * 2 - 1;
    }
    const double ab = weighted_kendall_tau(a, b);
    CHECK(ab == weighted_kendall_tau(b, a));
    CHECK((ab >= -1.0 && ab <= 1.0));
  }
}

TEST_CASE("scaled gap tables") {
  // Each pair carries weight 1/c, and the normalization by the summed
  // magnitudes cancels it.
  Rng rng(78);
  std::vector<double> x(10), cx(10);
  for (std::size_t p = 0; p < 10; ++p) {
    x[p] = rng.uniform() + 0.1;
    cx[p] = 3.0 * x[p];
  }
  CHECK(weighted_kendall_tau(x, cx) == doctest::Approx(1.0));
}

TEST_CASE("neighbor conventions") {
  const std::vector<std::string> ids{"t1", "t2", "t3"};
  const std::vector<double> taus{0.9, 0.1, 0.5};
  CHECK(top_t_neighbors(taus, ids, 2).dataset_ids == std::vector<std::string>{"t1", "t3"});
  const std::vector<double> even{0.2, 0.2, 0.2};
  const std::vector<std::string> shuffled{"c", "a", "b"};
  CHECK(top_t_neighbors(even, shuffled, 2).dataset_ids == std::vector<std::string>{"a", "b"});
  CHECK(top_t_neighbors(taus, ids, 3).similarities == std::vector<double>{0.9, 0.5, 0.1});
  // A single pair with equal gaps.
  const std::vector<double> perf{0.7, 0.2};
  const std::vector<std::size_t> both{0, 1};
  CHECK(tau_to_meta_task(ground_truth_gaps(perf, both), perf) == 1.0);
}
