#include "elect/ipm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "elect/core.hpp"
#include "elect/simd/kernels.hpp"

namespace elect {

namespace {

void check_lengths(std::span<const double> target, ScoreRows anchors) {
  for (const auto& a : anchors)
    if (a.size() != target.size())
      throw ValidationError("IPM: anchor and target score vectors differ in length");
}

std::int64_t tie_pairs(std::int64_t t) { return t * (t - 1) / 2; }

// Counts inversions (strictly decreasing pairs) while merge-sorting v.
std::int64_t merge_count(std::vector<double>& v, std::vector<double>& buf, std::size_t lo,
                         std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::int64_t swaps = merge_count(v, buf, lo, mid) + merge_count(v, buf, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      swaps += static_cast<std::int64_t>(mid - i);
      buf[k++] = v[j++];
    } else {
      buf[k++] = v[i++];
    }
  }
  while (i < mid) buf[k++] = v[i++];
  while (j < hi) buf[k++] = v[j++];
  std::copy(buf.begin() + static_cast<long>(lo), buf.begin() + static_cast<long>(hi),
            v.begin() + static_cast<long>(lo));
  return swaps;
}

// Shared HITS power iteration on the row Gram matrix. `gram` is q x q
// row-major, `sums` the row sums of W, r the sample count.
HitsResult hits_from_gram(const std::vector<double>& gram, const std::vector<double>& sums,
                          std::size_t r) {
  const std::size_t q = sums.size();
  HitsResult res;
  res.hubs.assign(q, 0.0);
  if (q == 0 || r == 0) return res;
  // First half-step from the uniform authority vector.
  const double a0 = 1.0 / std::sqrt(static_cast<double>(r));
  std::vector<double> h(q);
  for (std::size_t i = 0; i < q; ++i) h[i] = sums[i] * a0;
  double norm = std::sqrt(std::inner_product(h.begin(), h.end(), h.begin(), 0.0));
  if (norm == 0.0) return res;
  for (auto& v : h) v /= norm;
  std::vector<double> next(q);
  for (int it = 1; it <= kHitsMaxIterations; ++it) {
    for (std::size_t i = 0; i < q; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < q; ++j) s += gram[i * q + j] * h[j];
      next[i] = s;
    }
    norm = std::sqrt(std::inner_product(next.begin(), next.end(), next.begin(), 0.0));
    if (norm == 0.0) {
      res.hubs.assign(q, 0.0);
      res.iterations = it;
      return res;
    }
    double change = 0.0;
    for (std::size_t i = 0; i < q; ++i) {
      next[i] /= norm;
      change += (next[i] - h[i]) * (next[i] - h[i]);
    }
    h.swap(next);
    res.iterations = it;
    res.last_change = std::sqrt(change);
    if (res.last_change < kHitsTolerance) break;
  }
  res.hubs = std::move(h);
  return res;
}

}  // namespace

double kendall_tau_b(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ValidationError("kendall_tau_b: length mismatch");
  const std::size_t n = a.size();
  if (n < 2) return 0.0;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return a[i] < a[j] || (a[i] == a[j] && b[i] < b[j]);
  });
  std::int64_t ties_a = 0, ties_joint = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && a[order[j]] == a[order[i]]) ++j;
    ties_a += tie_pairs(static_cast<std::int64_t>(j - i));
    for (std::size_t s = i; s < j;) {
      std::size_t t = s + 1;
      while (t < j && b[order[t]] == b[order[s]]) ++t;
      ties_joint += tie_pairs(static_cast<std::int64_t>(t - s));
      s = t;
    }
    i = j;
  }
  std::vector<double> bs(n), buf(n);
  for (std::size_t i = 0; i < n; ++i) bs[i] = b[order[i]];
  const std::int64_t swaps = merge_count(bs, buf, 0, n);
  std::int64_t ties_b = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && bs[j] == bs[i]) ++j;
    ties_b += tie_pairs(static_cast<std::int64_t>(j - i));
    i = j;
  }
  const std::int64_t total = tie_pairs(static_cast<std::int64_t>(n));
  if (total == ties_a || total == ties_b) return 0.0;
  const std::int64_t net = total - ties_a - ties_b + ties_joint - 2 * swaps;
  const double denom = std::sqrt(static_cast<double>(total - ties_a) *
                                 static_cast<double>(total - ties_b));
  return static_cast<double>(net) / denom;
}

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ValidationError("pearson: length mismatch");
  if (a.empty()) return 0.0;
  const double ma = mean(a), mb = mean(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma, db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa <= 0.0 || sbb <= 0.0) return 0.0;
  return std::clamp(sab / (std::sqrt(saa) * std::sqrt(sbb)), -1.0, 1.0);
}

double mc_score(std::span<const double> target, ScoreRows anchors) {
  check_lengths(target, anchors);
  if (anchors.empty()) return 0.0;
  double s = 0.0;
  for (const auto& a : anchors) s += kendall_tau_b(target, a);
  return s / static_cast<double>(anchors.size());
}

double select_score(std::span<const double> target, ScoreRows anchors) {
  check_lengths(target, anchors);
  return AnchorContext({anchors.begin(), anchors.end()}).compute(target).select;
}

double hits_score(std::span<const double> target, ScoreRows anchors) {
  check_lengths(target, anchors);
  return AnchorContext({anchors.begin(), anchors.end()}).compute(target).hits;
}

HitsResult hits_hubs(ScoreRows rows) {
  const std::size_t q = rows.size();
  const std::size_t r = q ? rows[0].size() : 0;
  std::vector<std::vector<double>> w;
  std::vector<double> sums;
  for (const auto& row : rows) {
    if (row.size() != r) throw ValidationError("hits: rows differ in length");
    w.push_back(minmax_normalize(row));
    sums.push_back(simd::sum(w.back()));
  }
  std::vector<double> gram(q * q);
  for (std::size_t i = 0; i < q; ++i)
    for (std::size_t j = 0; j < q; ++j) gram[i * q + j] = simd::dot(w[i], w[j]);
  return hits_from_gram(gram, sums, r);
}

AnchorContext::AnchorContext(std::vector<std::vector<double>> anchor_scores)
    : raw_(std::move(anchor_scores)) {
  samples_ = raw_.empty() ? 0 : raw_[0].size();
  for (const auto& a : raw_) {
    if (a.size() != samples_) throw ValidationError("anchor score vectors differ in length");
    z_.push_back(znormalize(a));
    minmax_.push_back(minmax_normalize(a));
    row_sums_.push_back(simd::sum(minmax_.back()));
  }
  const std::size_t k = raw_.size();
  gram_.resize(k * k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) gram_[i * k + j] = simd::dot(minmax_[i], minmax_[j]);
}

IpmVector AnchorContext::compute(std::span<const double> target,
                                 std::optional<std::size_t> exclude,
                                 std::optional<std::span<const double>> taus) const {
  if (target.size() != samples_ && !raw_.empty())
    throw ValidationError("IPM: target length differs from the anchor scores");
  std::vector<std::size_t> used;
  for (std::size_t a = 0; a < raw_.size(); ++a)
    if (!exclude || *exclude != a) used.push_back(a);
  IpmVector out;
  if (used.empty()) return out;

  double tau_sum = 0.0;
  for (auto a : used) tau_sum += taus ? (*taus)[a] : kendall_tau_b(target, raw_[a]);
  out.mc = tau_sum / static_cast<double>(used.size());

  std::vector<double> consensus(samples_, 0.0);
  for (auto a : used)
    for (std::size_t i = 0; i < samples_; ++i) consensus[i] += z_[a][i];
  for (auto& c : consensus) c /= static_cast<double>(used.size());
  out.select = pearson(target, consensus);

  // Graph rows: used anchors in order, then the target.
  const std::size_t q = used.size() + 1;
  const auto target_w = minmax_normalize(target);
  std::vector<double> gram(q * q);
  std::vector<double> sums(q);
  const std::size_t k = raw_.size();
  for (std::size_t i = 0; i < used.size(); ++i) {
    sums[i] = row_sums_[used[i]];
    for (std::size_t j = 0; j < used.size(); ++j) gram[i * q + j] = gram_[used[i] * k + used[j]];
    const double cross = simd::dot(minmax_[used[i]], target_w);
    gram[i * q + (q - 1)] = cross;
    gram[(q - 1) * q + i] = cross;
  }
  sums[q - 1] = simd::sum(target_w);
  gram[q * q - 1] = simd::dot(target_w, target_w);
  out.hits = hits_from_gram(gram, sums, samples_).hubs[q - 1];
  return out;
}

IpmVector compute_ipms(const AnchorContext& anchors, std::span<const double> target,
                       std::optional<std::size_t> target_anchor) {
  return anchors.compute(target, target_anchor);
}

}  // namespace elect
