#include "elect/predictor.hpp"

#include <algorithm>
#include <numeric>

namespace elect {

namespace {

std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}

Matrix feature_matrix(std::span<const PairSample> samples) {
  Matrix x(samples.size(), 6);
  for (std::size_t i = 0; i < samples.size(); ++i)
    for (std::size_t f = 0; f < 6; ++f) x(i, f) = samples[i].features[f];
  return x;
}

}  // namespace

std::array<double, 6> pair_features(const IpmVector& a, const IpmVector& b) {
  return {a.mc, a.select, a.hits, b.mc, b.select, b.hits};
}

std::vector<PairSample> build_training_pairs(const TaskIpms& ipms, const PerformanceMatrix& perf,
                                             std::span<const std::size_t> tasks,
                                             std::span<const std::size_t> models) {
  const auto task_list = tasks.empty() ? all_indices(perf.tasks())
                                       : std::vector<std::size_t>(tasks.begin(), tasks.end());
  const auto model_list = models.empty() ? all_indices(perf.models())
                                         : std::vector<std::size_t>(models.begin(), models.end());
  if (ipms.size() != perf.tasks()) throw ValidationError("training pairs: IPM rows missing");
  std::vector<PairSample> out;
  out.reserve(task_list.size() * model_list.size() * model_list.size());
  for (auto i : task_list) {
    if (ipms[i].size() != perf.models())
      throw ValidationError("training pairs: missing IPMs for task " + perf.dataset_ids[i]);
    const auto row = perf.row(i);
    for (std::size_t a = 0; a < model_list.size(); ++a) {
      for (std::size_t b = a + 1; b < model_list.size(); ++b) {
        const auto j = model_list[a], k = model_list[b];
        const double gap = row[j] - row[k];
        out.push_back({pair_features(ipms[i][j], ipms[i][k]), gap});
        out.push_back({pair_features(ipms[i][k], ipms[i][j]), -gap});
      }
    }
  }
  return out;
}

GbtModel fit_pair_predictor(std::span<const PairSample> samples, const GbtParams& params) {
  if (samples.empty()) throw ValidationError("pair predictor: no training samples");
  std::vector<double> y(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) y[i] = samples[i].target;
  return fit_gbt(feature_matrix(samples), y, params);
}

double predict_gap(const GbtModel& model, const IpmVector& a, const IpmVector& b) {
  const auto ab = pair_features(a, b);
  const auto ba = pair_features(b, a);
  const double raw = 0.5 * (model.predict(ab) - model.predict(ba));
  return std::clamp(raw, -1.0, 1.0);
}

std::vector<std::size_t> task_folds(std::size_t n_tasks, std::size_t k_folds) {
  std::vector<std::size_t> fold(n_tasks);
  for (std::size_t p = 0; p < n_tasks; ++p) fold[p] = p % k_folds;
  return fold;
}

std::vector<double> task_cv_mse(const TaskIpms& ipms, const PerformanceMatrix& perf,
                                const GbtParams& params, std::size_t k_folds,
                                std::span<const std::size_t> models) {
  const std::size_t n = perf.tasks();
  if (k_folds < 2 || n < k_folds)
    throw ValidationError("cross-validation needs at least k_folds >= 2 tasks");
  const auto fold = task_folds(n, k_folds);
  std::vector<double> mse(k_folds, 0.0);
  for (std::size_t k = 0; k < k_folds; ++k) {
    std::vector<std::size_t> train, test;
    for (std::size_t i = 0; i < n; ++i) (fold[i] == k ? test : train).push_back(i);
    const auto train_pairs = build_training_pairs(ipms, perf, train, models);
    const auto model = fit_pair_predictor(train_pairs, params);
    const auto test_pairs = build_training_pairs(ipms, perf, test, models);
    double sse = 0.0;
    for (const auto& p : test_pairs) {
      IpmVector a{p.features[0], p.features[1], p.features[2]};
      IpmVector b{p.features[3], p.features[4], p.features[5]};
      const double e = predict_gap(model, a, b) - p.target;
      sse += e * e;
    }
    mse[k] = test_pairs.empty() ? 0.0 : sse / static_cast<double>(test_pairs.size());
  }
  return mse;
}

CvOutcome cv_tune_predictor(const TaskIpms& ipms, const PerformanceMatrix& perf,
                            std::span<const GbtParams> grid, std::size_t k_folds,
                            std::span<const std::size_t> models) {
  if (grid.empty()) throw ValidationError("cv_tune_predictor: empty parameter grid");
  if (perf.tasks() < k_folds)
    throw ValidationError("cv_tune_predictor: " + std::to_string(perf.tasks()) +
                          " tasks cannot fill " + std::to_string(k_folds) + " folds");
  CvOutcome out;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    out.fold_mse.push_back(task_cv_mse(ipms, perf, grid[g], k_folds, models));
    const auto& f = out.fold_mse.back();
    out.mean_mse.push_back(std::accumulate(f.begin(), f.end(), 0.0) / static_cast<double>(f.size()));
    if (g == 0 || out.mean_mse[g] < out.mean_mse[out.best_index]) out.best_index = g;
  }
  out.best = grid[out.best_index];
  return out;
}

std::vector<GbtParams> default_predictor_grid() {
  return {
      GbtParams{200, 4, 0.05, 20, 1.0, 0},
      GbtParams{100, 3, 0.1, 20, 1.0, 0},
  };
}

}  // namespace elect
