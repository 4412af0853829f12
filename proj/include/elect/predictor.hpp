#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "elect/gbt.hpp"
#include "elect/ipm.hpp"
#include "elect/performance.hpp"

namespace elect {

/// One training example for the pairwise gap regressor:
/// features = (ipm_a, ipm_b), target = P[a] - P[b].
struct PairSample {
  std::array<double, 6> features{};
  double target = 0.0;
};

// ipms[task][model] for the rows of a performance matrix.
using TaskIpms = std::vector<std::vector<IpmVector>>;

std::array<double, 6> pair_features(const IpmVector& a, const IpmVector& b);

// For each task and each model pair j < j' emits (a=j, b=j') and its mirror
// (a=j', b=j) with the negated gap. `tasks` restricts to a subset of rows and
// `models` to a subset of columns (empty = all).
std::vector<PairSample> build_training_pairs(const TaskIpms& ipms, const PerformanceMatrix& perf,
                                             std::span<const std::size_t> tasks = {},
                                             std::span<const std::size_t> models = {});

GbtModel fit_pair_predictor(std::span<const PairSample> samples, const GbtParams& params);

// Antisymmetrized gap prediction, (f(a,b) - f(b,a)) / 2 clamped to [-1, 1].
double predict_gap(const GbtModel& model, const IpmVector& a, const IpmVector& b);

struct CvOutcome {
  GbtParams best;
  std::size_t best_index = 0;
  std::vector<std::vector<double>> fold_mse;  // [setting][fold]
  std::vector<double> mean_mse;
};

// Task-wise fold assignment: task at position p goes to fold p % k.
std::vector<std::size_t> task_folds(std::size_t n_tasks, std::size_t k_folds);

// Mean held-out MSE of predict_gap over k task-wise folds.
std::vector<double> task_cv_mse(const TaskIpms& ipms, const PerformanceMatrix& perf,
                                const GbtParams& params, std::size_t k_folds,
                                std::span<const std::size_t> models = {});

// Grid search over `grid` minimizing mean held-out MSE with folds split by
// task; ties go to the earlier grid entry. Throws ValidationError when there
// are fewer tasks than folds or the grid is empty.
CvOutcome cv_tune_predictor(const TaskIpms& ipms, const PerformanceMatrix& perf,
                            std::span<const GbtParams> grid, std::size_t k_folds,
                            std::span<const std::size_t> models = {});

// Shipped tuning grid; the first entry is the default predictor setting.
std::vector<GbtParams> default_predictor_grid();

}  // namespace elect
