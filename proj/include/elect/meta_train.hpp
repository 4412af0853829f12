#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "elect/core.hpp"
#include "elect/gbt.hpp"
#include "elect/grid.hpp"
#include "elect/performance.hpp"
#include "elect/predictor.hpp"

namespace elect {

struct SelectionHyperparams {
  std::size_t t = 5;           // neighbor-set size
  std::size_t init_size = 7;   // initial model subset
  std::size_t patience = 17;   // stop after this many iterations with unchanged neighbors
  std::size_t budget = 50;     // maximum search iterations

  bool operator==(const SelectionHyperparams&) const = default;
};

struct AnchorSearchConfig {
  std::size_t max_anchors = 8;
  std::size_t k_folds = 3;
  double min_relative_improvement = 0.01;
  // Lighter predictor used to score candidate anchor sets.
  GbtParams screening{50, 3, 0.1, 20, 1.0, 0};
  // Models whose pairs enter the screening CV; 0 uses every model.
  std::size_t model_sample = 20;
  // Models tried as the next anchor; 0 tries every model.
  std::size_t candidate_sample = 20;
};

struct MetaTrainConfig {
  SelectionHyperparams hyperparams;
  int trials = 1;
  AnchorSearchConfig anchors;
  std::vector<GbtParams> predictor_grid = default_predictor_grid();
  std::size_t cv_folds = 3;
  // Models whose pairs enter predictor tuning; 0 uses every model. The final
  // predictor is always fitted on every pair.
  std::size_t cv_model_sample = 20;
  std::size_t jobs = 0;  // 0 = hardware concurrency
};

/// z-normalized scores of every model on every task (trial 0), plus the
/// pairwise tau-b matrix between models per task, computed on demand.
struct ScoreTable {
  std::vector<std::string> dataset_ids;
  std::vector<std::vector<std::vector<double>>> scores;  // [task][model][sample]
  std::vector<Matrix> taus;                              // [task] m x m, empty until built

  std::size_t tasks() const { return scores.size(); }
  std::size_t models() const { return scores.empty() ? 0 : scores[0].size(); }
  void build_taus(std::size_t jobs = 0);
  ScoreTable select_rows(std::span<const std::size_t> rows) const;
};

ScoreTable compute_scores(std::span<const Dataset> tasks, const ModelSet& models,
                          std::size_t jobs = 0);

// AP of every model on every labeled task. Stochastic families are averaged
// over `trials` re-seeded fits; trial 0 reuses the cached scores.
PerformanceMatrix compute_performance_matrix(std::span<const Dataset> tasks,
                                             const ModelSet& models, int trials,
                                             const ScoreTable& cache, std::size_t jobs = 0);
// Convenience overload that fits the score cache itself.
PerformanceMatrix compute_performance_matrix(std::span<const Dataset> tasks,
                                             const ModelSet& models, int trials,
                                             ScoreTable* cache_out = nullptr,
                                             std::size_t jobs = 0);

struct AnchorSelection {
  std::vector<std::size_t> anchors;   // model indices in selection order
  std::vector<double> mse_history;    // CV MSE after each accepted step
  double baseline_mse = 0.0;          // CV MSE with no anchors
};

// Greedy forward selection of anchors minimizing task-fold CV MSE of the
// screening predictor. Requires taus in `cache`.
AnchorSelection forward_select_anchors(const PerformanceMatrix& perf, const ScoreTable& cache,
                                       const AnchorSearchConfig& config);

// IPMs for every (task, model) against the anchors; anchor models are scored
// against the remaining anchors.
TaskIpms compute_all_ipms(const ScoreTable& cache, std::span<const std::size_t> anchors);

/// Offline artifact consumed by model selection.
struct MetaLearner {
  static constexpr int kFormatVersion = 1;

  GridSpec grid;
  ModelSet model_set;
  std::vector<std::size_t> anchors;
  PerformanceMatrix performance;
  TaskIpms ipms;
  GbtModel predictor;
  GbtParams predictor_params;
  SelectionHyperparams hyperparams;
  int format_version = kFormatVersion;

  void validate() const;
  std::vector<ModelId> anchor_models() const;
};

// Runs the full offline phase on labeled tasks.
MetaLearner meta_train(std::span<const Dataset> tasks, const GridSpec& grid,
                       const MetaTrainConfig& config);
// Offline phase from precomputed scores and performances (rows aligned).
MetaLearner meta_train_from_cache(const GridSpec& grid, const PerformanceMatrix& perf,
                                  const ScoreTable& cache, const MetaTrainConfig& config);

// Bundle directory: manifest.json, P.csv, ipms.csv, predictor.json.
void save_meta_learner(const MetaLearner& ml, const std::filesystem::path& dir);
MetaLearner load_meta_learner(const std::filesystem::path& dir);
// Optional per-task score dump under dir/scores/<task>/<model index>.csv.
void save_score_cache(const ScoreTable& cache, const ModelSet& models,
                      const std::filesystem::path& dir);

}  // namespace elect
