#include "elect/meta_train.hpp"

#include <algorithm>
#include <numeric>

#include "elect/detectors.hpp"
#include "elect/metrics.hpp"
#include "elect/parallel.hpp"

namespace elect {

void PerformanceMatrix::validate() const {
  if (dataset_ids.size() != values.rows())
    throw ValidationError("performance matrix: row labels do not match rows");
  if (model_set.size() != values.cols())
    throw ValidationError("performance matrix: model set does not match columns");
  for (double v : values.data())
    if (!(v >= 0.0 && v <= 1.0))
      throw ValidationError("performance matrix: entry outside [0,1]");
}

PerformanceMatrix PerformanceMatrix::select_rows(std::span<const std::size_t> rows) const {
  PerformanceMatrix out{Matrix(rows.size(), models()), {}, model_set};
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out.dataset_ids.push_back(dataset_ids[rows[r]]);
    std::copy(row(rows[r]).begin(), row(rows[r]).end(), out.values.row(r).begin());
  }
  return out;
}

std::vector<double> PerformanceMatrix::column_means() const {
  std::vector<double> means(models(), 0.0);
  for (std::size_t i = 0; i < tasks(); ++i)
    for (std::size_t j = 0; j < models(); ++j) means[j] += values(i, j);
  for (auto& m : means) m /= static_cast<double>(std::max<std::size_t>(tasks(), 1));
  return means;
}

void ScoreTable::build_taus(std::size_t jobs) {
  if (taus.size() == scores.size()) return;
  taus.assign(scores.size(), Matrix());
  parallel_for(scores.size(), jobs, [&](std::size_t i) {
    const std::size_t m = scores[i].size();
    Matrix t(m, m, 1.0);
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = a + 1; b < m; ++b)
        t(a, b) = t(b, a) = kendall_tau_b(scores[i][a], scores[i][b]);
    taus[i] = std::move(t);
  });
}

ScoreTable ScoreTable::select_rows(std::span<const std::size_t> rows) const {
  ScoreTable out;
  for (auto r : rows) {
    out.dataset_ids.push_back(dataset_ids[r]);
    out.scores.push_back(scores[r]);
    if (taus.size() == scores.size()) out.taus.push_back(taus[r]);
  }
  return out;
}

ScoreTable compute_scores(std::span<const Dataset> tasks, const ModelSet& models,
                          std::size_t jobs) {
  ScoreTable table;
  const std::size_t m = models.size();
  table.scores.assign(tasks.size(), std::vector<std::vector<double>>(m));
  for (const auto& d : tasks) {
    d.validate();
    table.dataset_ids.push_back(d.id);
  }
  parallel_for(tasks.size() * m, jobs, [&](std::size_t flat) {
    const std::size_t i = flat / m, j = flat % m;
    table.scores[i][j] = fit_score(tasks[i], models[j]).values;
  });
  return table;
}

PerformanceMatrix compute_performance_matrix(std::span<const Dataset> tasks,
                                             const ModelSet& models, int trials,
                                             const ScoreTable& cache, std::size_t jobs) {
  if (trials < 1) throw ValidationError("trials must be at least 1");
  if (cache.tasks() != tasks.size() || cache.models() != models.size())
    throw ValidationError("score cache does not match the tasks and models");
  for (const auto& d : tasks) d.validate_for_evaluation();
  const std::size_t m = models.size();
  PerformanceMatrix perf{Matrix(tasks.size(), m), {}, models};
  for (const auto& d : tasks) perf.dataset_ids.push_back(d.id);
  parallel_for(tasks.size() * m, jobs, [&](std::size_t flat) {
    const std::size_t i = flat / m, j = flat % m;
    const auto& labels = *tasks[i].labels;
    double ap = average_precision(cache.scores[i][j], labels);
    if (is_stochastic(models[j].family) && trials > 1) {
      for (int t = 1; t < trials; ++t) ap += average_precision(fit_score(tasks[i], models[j], t).values, labels);
      ap /= trials;
    }
    perf.values(i, j) = ap;
  });
  return perf;
}

PerformanceMatrix compute_performance_matrix(std::span<const Dataset> tasks,
                                             const ModelSet& models, int trials,
                                             ScoreTable* cache_out, std::size_t jobs) {
  for (const auto& d : tasks) d.validate_for_evaluation();
  ScoreTable cache = compute_scores(tasks, models, jobs);
  auto perf = compute_performance_matrix(tasks, models, trials, cache, jobs);
  if (cache_out) *cache_out = std::move(cache);
  return perf;
}

namespace {

IpmVector ipm_with_cache(const ScoreTable& cache, std::size_t task, const AnchorContext& ctx,
                         std::span<const std::size_t> anchors, std::size_t model) {
  std::optional<std::size_t> exclude;
  std::vector<double> taus(anchors.size());
  for (std::size_t a = 0; a < anchors.size(); ++a) {
    if (anchors[a] == model) exclude = a;
    taus[a] = cache.taus.size() == cache.tasks()
                  ? cache.taus[task](model, anchors[a])
                  : kendall_tau_b(cache.scores[task][model], cache.scores[task][anchors[a]]);
  }
  return ctx.compute(cache.scores[task][model], exclude, std::span<const double>(taus));
}

TaskIpms ipms_for_models(const ScoreTable& cache, std::span<const std::size_t> anchors,
                         std::span<const std::size_t> models) {
  TaskIpms ipms(cache.tasks(), std::vector<IpmVector>(cache.models()));
  if (anchors.empty()) return ipms;
  for (std::size_t i = 0; i < cache.tasks(); ++i) {
    std::vector<std::vector<double>> rows;
    for (auto a : anchors) rows.push_back(cache.scores[i][a]);
    const AnchorContext ctx(std::move(rows));
    for (auto j : models) ipms[i][j] = ipm_with_cache(cache, i, ctx, anchors, j);
  }
  return ipms;
}

std::vector<std::size_t> spread_sample(std::size_t m, std::size_t want) {
  std::vector<std::size_t> out;
  if (want == 0 || want >= m) {
    out.resize(m);
    std::iota(out.begin(), out.end(), std::size_t{0});
    return out;
  }
  for (std::size_t i = 0; i < want; ++i) out.push_back(i * m / want);
  return out;
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

AnchorSelection forward_select_anchors(const PerformanceMatrix& perf, const ScoreTable& cache,
                                       const AnchorSearchConfig& config) {
  if (config.max_anchors < 1) throw ValidationError("max_anchors must be at least 1");
  if (cache.tasks() != perf.tasks() || cache.models() != perf.models())
    throw ValidationError("score cache does not match the performance matrix");
  const std::size_t m = perf.models();
  const auto sampled = spread_sample(m, config.model_sample);
  const auto candidates = spread_sample(m, config.candidate_sample);
  auto cv_mse = [&](std::span<const std::size_t> anchors) {
    const auto ipms = ipms_for_models(cache, anchors, sampled);
    return mean_of(task_cv_mse(ipms, perf, config.screening, config.k_folds, sampled));
  };

  AnchorSelection sel;
  sel.baseline_mse = cv_mse({});
  double current = sel.baseline_mse;
  while (sel.anchors.size() < std::min(config.max_anchors, m)) {
    std::size_t best_model = m;
    double best_mse = 0.0;
    std::vector<std::size_t> trial = sel.anchors;
    trial.push_back(0);
    for (auto c : candidates) {
      if (std::find(sel.anchors.begin(), sel.anchors.end(), c) != sel.anchors.end()) continue;
      trial.back() = c;
      const double mse = cv_mse(trial);
      if (best_model == m || mse < best_mse) {
        best_model = c;
        best_mse = mse;
      }
    }
    if (best_model == m) break;
    const bool first = sel.anchors.empty();
    const double improvement = current > 0.0 ? (current - best_mse) / current : 0.0;
    if (!first && improvement < config.min_relative_improvement) break;
    sel.anchors.push_back(best_model);
    sel.mse_history.push_back(best_mse);
    current = best_mse;
  }
  return sel;
}

TaskIpms compute_all_ipms(const ScoreTable& cache, std::span<const std::size_t> anchors) {
  std::vector<std::size_t> all(cache.models());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return ipms_for_models(cache, anchors, all);
}

void MetaLearner::validate() const {
  performance.validate();
  if (!(performance.model_set == model_set))
    throw ValidationError("meta-learner: performance matrix uses a different model set");
  if (anchors.empty()) throw ValidationError("meta-learner: empty anchor set");
  for (auto a : anchors)
    if (a >= model_set.size()) throw ValidationError("meta-learner: anchor outside model set");
  if (ipms.size() != performance.tasks())
    throw ValidationError("meta-learner: IPM rows do not match tasks");
  for (const auto& row : ipms)
    if (row.size() != model_set.size())
      throw ValidationError("meta-learner: IPM row does not cover every model");
  const auto& h = hyperparams;
  if (h.t == 0 || h.init_size == 0 || h.patience == 0 || h.budget == 0)
    throw ValidationError("meta-learner: hyperparameters must be positive");
  if (h.t > performance.tasks())
    throw ValidationError("meta-learner: t exceeds the number of meta-train tasks");
  if (h.init_size > model_set.size())
    throw ValidationError("meta-learner: init_size exceeds the model count");
}

std::vector<ModelId> MetaLearner::anchor_models() const {
  std::vector<ModelId> out;
  for (auto a : anchors) out.push_back(model_set[a]);
  return out;
}

MetaLearner meta_train_from_cache(const GridSpec& grid, const PerformanceMatrix& perf,
                                  const ScoreTable& cache, const MetaTrainConfig& config) {
  if (perf.tasks() < config.hyperparams.t + 1)
    throw ValidationError("meta-training needs at least t + 1 = " +
                          std::to_string(config.hyperparams.t + 1) + " tasks, got " +
                          std::to_string(perf.tasks()));
  const ScoreTable* table = &cache;
  ScoreTable local;
  if (cache.taus.size() != cache.tasks()) {
    local = cache;
    local.build_taus(config.jobs);
    table = &local;
  }
  MetaLearner ml;
  ml.grid = grid;
  ml.model_set = perf.model_set;
  ml.performance = perf;
  ml.hyperparams = config.hyperparams;
  ml.anchors = forward_select_anchors(perf, *table, config.anchors).anchors;
  ml.ipms = compute_all_ipms(*table, ml.anchors);
  const std::size_t folds = std::min(config.cv_folds, perf.tasks());
  ml.predictor_params = config.predictor_grid.size() == 1
                            ? config.predictor_grid.front()
                            : cv_tune_predictor(ml.ipms, perf, config.predictor_grid, folds,
                                                spread_sample(perf.models(), config.cv_model_sample))
                                  .best;
  ml.predictor = fit_pair_predictor(build_training_pairs(ml.ipms, perf), ml.predictor_params);
  ml.validate();
  return ml;
}

MetaLearner meta_train(std::span<const Dataset> tasks, const GridSpec& grid,
                       const MetaTrainConfig& config) {
  if (tasks.size() < config.hyperparams.t + 1)
    throw ValidationError("meta-training needs at least t + 1 = " +
                          std::to_string(config.hyperparams.t + 1) + " tasks");
  const ModelSet models = build_model_set(grid);
  ScoreTable cache;
  auto perf = compute_performance_matrix(tasks, models, config.trials, &cache, config.jobs);
  cache.build_taus(config.jobs);
  return meta_train_from_cache(grid, perf, cache, config);
}

}  // namespace elect
