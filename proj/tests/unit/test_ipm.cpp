#include <doctest.h>

#include <cmath>

#include "elect/core.hpp"
#include "elect/ipm.hpp"
#include "elect/rng.hpp"

using namespace elect;

namespace {

double sign(double v) { return (v > 0) - (v < 0); }

// O(n^2) tau-b straight from the pair counts.
double brute_tau_b(const std::vector<double>& a, const std::vector<double>& b) {
  double concordant = 0, discordant = 0, ties_a = 0, ties_b = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const double s = sign(a[i] - a[j]) * sign(b[i] - b[j]);
      if (s > 0) ++concordant;
      if (s < 0) ++discordant;
      if (a[i] == a[j]) ++ties_a;
      if (b[i] == b[j]) ++ties_b;
    }
  const double n0 = static_cast<double>(a.size() * (a.size() - 1) / 2);
  if (n0 == ties_a || n0 == ties_b) return 0.0;
  return (concordant - discordant) / std::sqrt((n0 - ties_a) * (n0 - ties_b));
}

std::vector<double> coarse(Rng& rng, std::size_t n, double levels) {
  std::vector<double> v(n);
  for (auto& x : v) x = std::round(rng.uniform() * levels);
  return v;
}

std::vector<double> smooth(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

// Plain bipartite HITS on the min-max normalized rows.
std::vector<double> bipartite_hubs(const std::vector<std::vector<double>>& rows) {
  const std::size_t q = rows.size(), r = rows[0].size();
  std::vector<std::vector<double>> w;
  for (const auto& row : rows) {
    double lo = row[0], hi = row[0];
    for (double v : row) lo = std::min(lo, v), hi = std::max(hi, v);
    std::vector<double> n(r, 0.0);
    if (hi > lo)
      for (std::size_t i = 0; i < r; ++i) n[i] = (row[i] - lo) / (hi - lo);
    w.push_back(n);
  }
  std::vector<double> auth(r, 1.0), hub(q, 0.0);
  for (int it = 0; it < 5000; ++it) {
    for (std::size_t i = 0; i < q; ++i) {
      hub[i] = 0;
      for (std::size_t s = 0; s < r; ++s) hub[i] += w[i][s] * auth[s];
    }
    double norm = 0;
    for (double v : hub) norm += v * v;
    for (auto& v : hub) v /= std::sqrt(norm);
    for (std::size_t s = 0; s < r; ++s) {
      auth[s] = 0;
      for (std::size_t i = 0; i < q; ++i) auth[s] += w[i][s] * hub[i];
    }
  }
  return hub;
}

}  // namespace

TEST_CASE("tau-b matches the pair-count oracle") {
  Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial) * 3;
    const auto a = trial % 2 ? coarse(rng, n, 4) : smooth(rng, n);
    const auto b = trial % 3 ? coarse(rng, n, 3) : smooth(rng, n);
    CHECK(kendall_tau_b(a, b) == doctest::Approx(brute_tau_b(a, b)).epsilon(1e-12));
  }
  const std::vector<double> up{1, 2, 3, 4}, down{4, 3, 2, 1}, flat{2, 2, 2, 2};
  CHECK(kendall_tau_b(up, up) == 1.0);
  CHECK(kendall_tau_b(up, down) == -1.0);
  CHECK(kendall_tau_b(up, flat) == 0.0);
}

TEST_CASE("pearson") {
  const std::vector<double> a{1, 2, 3}, b{2, 4, 6}, c{3, 2, 1}, flat{1, 1, 1};
  CHECK(pearson(a, b) == doctest::Approx(1.0));
  CHECK(pearson(a, c) == doctest::Approx(-1.0));
  CHECK(pearson(a, flat) == 0.0);
  const std::vector<double> x{1, 2, 3, 4}, y{1, 3, 2, 4};
  // Centered: (-1.5,-0.5,0.5,1.5) and (-1.5,0.5,-0.5,1.5): 4/5.
  CHECK(pearson(x, y) == doctest::Approx(0.8));
}

TEST_CASE("MC and SELECT against direct formulas") {
  Rng rng(8);
  std::vector<std::vector<double>> anchors;
  for (int a = 0; a < 4; ++a) anchors.push_back(smooth(rng, 50));
  const auto target = smooth(rng, 50);
  double tau = 0;
  for (const auto& a : anchors) tau += brute_tau_b(target, a);
  CHECK(mc_score(target, anchors) == doctest::Approx(tau / 4.0).epsilon(1e-12));
  std::vector<double> consensus(50, 0.0);
  for (const auto& a : anchors) {
    const auto z = znormalize(a);
    for (std::size_t i = 0; i < 50; ++i) consensus[i] += z[i] / 4.0;
  }
  CHECK(select_score(target, anchors) == doctest::Approx(pearson(target, consensus)).epsilon(1e-12));
}

TEST_CASE("HITS hub scores match plain bipartite iteration") {
  Rng rng(12);
  std::vector<std::vector<double>> rows;
  for (int q = 0; q < 5; ++q) rows.push_back(smooth(rng, 40));
  const auto got = hits_hubs(rows);
  const auto want = bipartite_hubs(rows);
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(std::abs(got.hubs[i] - want[i]) < 1e-7);
  CHECK(got.iterations <= kHitsMaxIterations);
  auto anchors = rows;
  const auto target = anchors.back();
  anchors.pop_back();
  CHECK(std::abs(hits_score(target, anchors) - want.back()) < 1e-7);
}

TEST_CASE("anchor context equals the direct functions") {
  Rng rng(31);
  std::vector<std::vector<double>> anchors;
  for (int a = 0; a < 5; ++a) anchors.push_back(smooth(rng, 64));
  const AnchorContext ctx(anchors);
  for (int trial = 0; trial < 5; ++trial) {
    const auto target = smooth(rng, 64);
    const auto ipm = ctx.compute(target);
    CHECK(ipm.mc == doctest::Approx(mc_score(target, anchors)).epsilon(1e-12));
    CHECK(ipm.select == doctest::Approx(select_score(target, anchors)).epsilon(1e-12));
    std::vector<double> taus;
    for (const auto& a : anchors) taus.push_back(kendall_tau_b(target, a));
    CHECK(ctx.compute(target, std::nullopt, std::span<const double>(taus)) == ipm);
  }
  // An anchor scored against the rest excludes itself.
  std::vector<std::vector<double>> rest(anchors.begin() + 1, anchors.end());
  const auto self = compute_ipms(ctx, anchors[0], std::size_t{0});
  CHECK(self.mc == doctest::Approx(mc_score(anchors[0], rest)).epsilon(1e-12));
  CHECK(self.select == doctest::Approx(select_score(anchors[0], rest)).epsilon(1e-12));
  CHECK(std::abs(self.hits - hits_score(anchors[0], rest)) < 1e-12);
}

TEST_CASE("IPM edge cases") {
  const AnchorContext one({{1.0, 2.0, 3.0}});
  const std::vector<double> t{3.0, 1.0, 2.0};
  CHECK(compute_ipms(one, t, std::size_t{0}) == IpmVector{});
  CHECK(compute_ipms(AnchorContext{}, t) == IpmVector{});
  const std::vector<double> wrong{1.0, 2.0};
  CHECK_THROWS_AS(one.compute(wrong), ValidationError);
  // A target equal to the single anchor agrees perfectly.
  const std::vector<double> same{1.0, 2.0, 3.0};
  const auto ipm = one.compute(same);
  CHECK(ipm.mc == 1.0);
  CHECK(ipm.select == doctest::Approx(1.0));
}

TEST_CASE("IPM hand examples") {
  const std::vector<double> t{1, 2, 3, 4};
  const std::vector<std::vector<double>> two{{1, 2, 4, 3}, {2, 1, 3, 4}};
  CHECK(mc_score(t, two) == doctest::Approx(2.0 / 3.0));
  const std::vector<std::vector<double>> rev{{4, 3, 2, 1}};
  CHECK(mc_score(t, rev) == -1.0);
  const std::vector<double> u{0, 1, 2};
  const std::vector<std::vector<double>> cancel{{0, 1, 2}, {2, 1, 0}};
  CHECK(select_score(u, cancel) == 0.0);
  const std::vector<double> neg{-1, -2, -3, -4};
  const std::vector<std::vector<double>> one{{1, 2, 3, 4}};
  CHECK(select_score(neg, one) == doctest::Approx(-1.0));
}

TEST_CASE("HITS symmetric and disjoint-support cases") {
  const std::vector<std::vector<double>> same{{1, 5, 2}, {1, 5, 2}, {1, 5, 2}};
  for (double h : hits_hubs(same).hubs) CHECK(h == doctest::Approx(1.0 / std::sqrt(3.0)));
  // Anchors put their mass on the first samples, the target on the last.
  const std::vector<std::vector<double>> anchors{{1, 1, 0, 0, 0}, {1, 0.9, 0, 0, 0}};
  const std::vector<double> target{0, 0, 0, 0.2, 1};
  std::vector<std::vector<double>> rows = anchors;
  rows.push_back(target);
  const auto h = hits_hubs(rows);
  CHECK(h.hubs[2] < h.hubs[0]);
  CHECK(h.hubs[2] < h.hubs[1]);
  CHECK(h.last_change < kHitsTolerance);
}

TEST_CASE("IPMs under monotone transforms") {
  Rng rng(61);
  std::vector<std::vector<double>> anchors;
  for (int a = 0; a < 3; ++a) anchors.push_back(smooth(rng, 30));
  const auto t = smooth(rng, 30);
  std::vector<double> cubed, affine;
  for (double v : t) cubed.push_back(v * v * v), affine.push_back(3.0 * v + 2.0);
  const AnchorContext ctx(anchors);
  CHECK(ctx.compute(cubed).mc == ctx.compute(t).mc);
  CHECK(ctx.compute(affine).select == doctest::Approx(ctx.compute(t).select).epsilon(1e-12));
  CHECK(ctx.compute(affine).hits == doctest::Approx(ctx.compute(t).hits).epsilon(1e-9));
}
