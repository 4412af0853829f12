#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "elect/core.hpp"
#include "elect/model_id.hpp"

namespace elect {

/// Outlier scores of one model on one dataset; higher = more outlying.
struct ScoreVector {
  std::vector<double> values;
  ModelId model;
  std::string dataset_id;
};

enum class KnnAggregate { Largest, Mean, Median };
enum class Metric { Euclidean, Manhattan };

// Raw detector scores. Each throws ValidationError when its precondition
// (k < r, subsample <= r, ...) does not hold.
std::vector<double> knn_scores(const Matrix& x, int k, KnnAggregate agg);
std::vector<double> lof_scores(const Matrix& x, int k, Metric metric);
std::vector<double> iforest_scores(const Matrix& x, int n_trees, int subsample,
                                   std::uint64_t seed);
std::vector<double> hbos_scores(const Matrix& x, int n_bins);
std::vector<double> pca_recon_scores(const Matrix& x, double var_fraction);

// Local reachability densities are clamped here so duplicated points stay finite.
inline constexpr double kLofMaxDensity = 1e12;
inline constexpr double kHbosEpsilon = 1e-12;

// All pairwise distances, row-major r x r, via the active SIMD kernels.
std::vector<double> pairwise_distances(const Matrix& x, Metric metric);

// Raw scores for a model id. `trial` > 0 re-seeds stochastic families
// (trial 0 uses the seed stored in the id). The iForest subsample size is
// capped at r.
std::vector<double> raw_scores(const Matrix& x, const ModelId& model, int trial = 0);

// z-normalized scores of `model` on the dataset.
ScoreVector fit_score(const UnlabeledDataset& d, const ModelId& model, int trial = 0);
ScoreVector fit_score(const Dataset& d, const ModelId& model, int trial = 0);

bool is_stochastic(Family f);

// Process-wide count of detector fits, for cost accounting in tests.
std::uint64_t fit_counter();
void reset_fit_counter();

}  // namespace elect
