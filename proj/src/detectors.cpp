#include "elect/detectors.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>

#include "elect/rng.hpp"
#include "elect/simd/kernels.hpp"

namespace elect {

namespace {

std::atomic<std::uint64_t> g_fits{0};

void check_k(const Matrix& x, int k, const char* who) {
  if (k < 1) throw ValidationError(std::string(who) + ": k must be positive");
  if (static_cast<std::size_t>(k) >= x.rows())
    throw ValidationError(std::string(who) + ": k = " + std::to_string(k) +
                          " must be below the sample count " + std::to_string(x.rows()));
}

// Distances from point i to every other point, ascending.
std::vector<double> sorted_neighbor_distances(const std::vector<double>& dist, std::size_t r,
                                              std::size_t i) {
  std::vector<double> out;
  out.reserve(r - 1);
  for (std::size_t j = 0; j < r; ++j)
    if (j != i) out.push_back(dist[i * r + j]);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<double> pairwise_distances(const Matrix& x, Metric metric) {
  const std::size_t r = x.rows();
  const std::size_t d = x.cols();
  const auto cols = x.transposed();
  const auto& k = simd::active();
  auto row_fn = metric == Metric::Euclidean ? k.euclidean_row : k.manhattan_row;
  std::vector<double> dist(r * r);
  for (std::size_t i = 0; i < r; ++i) row_fn(x.row(i).data(), cols.data(), r, d, &dist[i * r]);
  return dist;
}

std::vector<double> knn_scores(const Matrix& x, int k, KnnAggregate agg) {
  check_k(x, k, "knn");
  const std::size_t r = x.rows();
  const auto dist = pairwise_distances(x, Metric::Euclidean);
  const auto kk = static_cast<std::size_t>(k);
  std::vector<double> scores(r);
  std::vector<double> row;
  for (std::size_t i = 0; i < r; ++i) {
    row.clear();
    for (std::size_t j = 0; j < r; ++j)
      if (j != i) row.push_back(dist[i * r + j]);
    std::partial_sort(row.begin(), row.begin() + static_cast<long>(kk), row.end());
    switch (agg) {
      case KnnAggregate::Largest:
        scores[i] = row[kk - 1];
        break;
      case KnnAggregate::Mean: {
        double s = 0.0;
        for (std::size_t t = 0; t < kk; ++t) s += row[t];
        scores[i] = s / static_cast<double>(kk);
        break;
      }
      case KnnAggregate::Median:
        scores[i] = kk % 2 ? row[kk / 2] : 0.5 * (row[kk / 2 - 1] + row[kk / 2]);
        break;
    }
  }
  return scores;
}

std::vector<double> lof_scores(const Matrix& x, int k, Metric metric) {
  check_k(x, k, "lof");
  const std::size_t r = x.rows();
  const auto dist = pairwise_distances(x, metric);
  const auto kk = static_cast<std::size_t>(k);

  // k-distance and the (tie-inclusive) k-neighborhood of every point.
  std::vector<double> kdist(r);
  std::vector<std::vector<std::size_t>> hood(r);
  for (std::size_t i = 0; i < r; ++i) {
    kdist[i] = sorted_neighbor_distances(dist, r, i)[kk - 1];
    for (std::size_t j = 0; j < r; ++j)
      if (j != i && dist[i * r + j] <= kdist[i]) hood[i].push_back(j);
  }
  std::vector<double> lrd(r);
  for (std::size_t i = 0; i < r; ++i) {
    double reach = 0.0;
    for (auto o : hood[i]) reach += std::max(kdist[o], dist[i * r + o]);
    reach /= static_cast<double>(hood[i].size());
    lrd[i] = reach > 0.0 ? std::min(1.0 / reach, kLofMaxDensity) : kLofMaxDensity;
  }
  std::vector<double> scores(r);
  for (std::size_t i = 0; i < r; ++i) {
    double s = 0.0;
    for (auto o : hood[i]) s += lrd[o] / lrd[i];
    scores[i] = s / static_cast<double>(hood[i].size());
  }
  return scores;
}

std::vector<double> hbos_scores(const Matrix& x, int n_bins) {
  if (n_bins < 2) throw ValidationError("hbos: n_bins must be at least 2");
  const std::size_t r = x.rows();
  const auto bins = static_cast<std::size_t>(n_bins);
  std::vector<double> scores(r, 0.0);
  std::vector<std::size_t> bin_of(r);
  std::vector<std::size_t> counts;
  for (std::size_t f = 0; f < x.cols(); ++f) {
    double lo = x(0, f), hi = x(0, f);
    for (std::size_t i = 1; i < r; ++i) {
      lo = std::min(lo, x(i, f));
      hi = std::max(hi, x(i, f));
    }
    if (hi <= lo) {
      // Constant feature: a single bin holding every point.
      double contribution = -std::log(1.0 + kHbosEpsilon);
      for (auto& s : scores) s += contribution;
      continue;
    }
    const double width = (hi - lo) / static_cast<double>(bins);
    counts.assign(bins, 0);
    for (std::size_t i = 0; i < r; ++i) {
      auto b = static_cast<std::size_t>((x(i, f) - lo) / width);
      bin_of[i] = std::min(b, bins - 1);
      ++counts[bin_of[i]];
    }
    for (std::size_t i = 0; i < r; ++i) {
      double density = static_cast<double>(counts[bin_of[i]]) / (static_cast<double>(r) * width);
      scores[i] += -std::log(density + kHbosEpsilon);
    }
  }
  return scores;
}

std::vector<double> pca_recon_scores(const Matrix& x, double var_fraction) {
  if (x.cols() < 2) throw ValidationError("pca: needs at least 2 features");
  if (!(var_fraction > 0.0 && var_fraction < 1.0))
    throw ValidationError("pca: var_fraction must lie in (0,1)");
  const auto r = static_cast<Eigen::Index>(x.rows());
  const auto d = static_cast<Eigen::Index>(x.cols());
  Eigen::MatrixXd centered(r, d);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index f = 0; f < d; ++f)
      centered(i, f) = x(static_cast<std::size_t>(i), static_cast<std::size_t>(f));
  centered.rowwise() -= centered.colwise().mean();
  Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(r);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  // Eigen returns ascending eigenvalues; walk from the largest.
  const Eigen::VectorXd& values = eig.eigenvalues();
  double total = 0.0;
  for (Eigen::Index c = 0; c < d; ++c) total += std::max(values(c), 0.0);
  std::vector<double> scores(x.rows(), 0.0);
  if (total <= 0.0) return scores;
  Eigen::Index keep = 0;
  double explained = 0.0;
  while (keep < d) {
    explained += std::max(values(d - 1 - keep), 0.0);
    ++keep;
    if (explained / total >= var_fraction) break;
  }
  Eigen::MatrixXd basis = eig.eigenvectors().rightCols(keep);
  Eigen::MatrixXd residual = centered - (centered * basis) * basis.transpose();
  for (Eigen::Index i = 0; i < r; ++i)
    scores[static_cast<std::size_t>(i)] = residual.row(i).squaredNorm();
  return scores;
}

bool is_stochastic(Family f) { return f == Family::IForest; }

std::vector<double> raw_scores(const Matrix& x, const ModelId& model, int trial) {
  g_fits.fetch_add(1, std::memory_order_relaxed);
  switch (model.family) {
    case Family::Knn: {
      const auto& agg = model.text_param("agg");
      KnnAggregate a = agg == "largest" ? KnnAggregate::Largest
                       : agg == "mean"  ? KnnAggregate::Mean
                                        : KnnAggregate::Median;
      return knn_scores(x, static_cast<int>(model.int_param("k")), a);
    }
    case Family::Lof:
      return lof_scores(x, static_cast<int>(model.int_param("k")),
                        model.text_param("metric") == "manhattan" ? Metric::Manhattan
                                                                  : Metric::Euclidean);
    case Family::IForest: {
      auto seed = static_cast<std::uint64_t>(model.int_param("seed"));
      if (trial > 0) seed = derive_seed(seed, static_cast<std::uint64_t>(trial));
      auto psi = std::min<std::int64_t>(model.int_param("subsample"),
                                        static_cast<std::int64_t>(x.rows()));
      return iforest_scores(x, static_cast<int>(model.int_param("n_trees")),
                            static_cast<int>(psi), seed);
    }
    case Family::Hbos:
      return hbos_scores(x, static_cast<int>(model.int_param("n_bins")));
    case Family::PcaRecon:
      return pca_recon_scores(x, model.real_param("var_fraction"));
  }
  throw ValidationError("unknown detector family");
}

ScoreVector fit_score(const UnlabeledDataset& d, const ModelId& model, int trial) {
  auto raw = raw_scores(d.x, model, trial);
  return {znormalize(raw), model, d.id};
}

ScoreVector fit_score(const Dataset& d, const ModelId& model, int trial) {
  auto raw = raw_scores(d.x, model, trial);
  return {znormalize(raw), model, d.id};
}

std::uint64_t fit_counter() { return g_fits.load(); }
void reset_fit_counter() { g_fits.store(0); }

}  // namespace elect
