#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "elect/meta_train.hpp"
#include "elect/metrics.hpp"
#include "elect/select.hpp"

namespace elect {

enum class Method {
  Elect,
  ElectGreedy,
  ElectSum,
  ElectRandomInit,
  FixedModel,
  GlobalBest,
  Random,
  MegaEnsemble,
  IpmMc,
  IpmSelect,
  IpmHits,
};
inline constexpr Method kAllMethods[] = {
    Method::Elect,  Method::ElectGreedy,  Method::ElectSum, Method::ElectRandomInit,
    Method::FixedModel, Method::GlobalBest, Method::Random, Method::MegaEnsemble,
    Method::IpmMc,  Method::IpmSelect,    Method::IpmHits};

std::string_view method_name(Method m);
Method parse_method(std::string_view name);
// Comma-separated list; "all" expands to every method.
std::vector<Method> parse_method_list(std::string_view list);
bool is_elect_variant(Method m);

struct HarnessConfig {
  MetaTrainConfig meta;
  std::uint64_t seed = 0;
  InitKind init = InitKind::Coverage;  // used by elect, elect_greedy, elect_sum
  bool strict_coverage = true;
  std::string fixed_model = "iforest(n_trees=100,subsample=128,seed=1)";
};

struct DatasetResult {
  std::string dataset_id;
  std::string selected;  // canonical model string, or "ensemble"
  double ap = 0.0;
  double ap_rank = 0.0;
  std::size_t models_fitted = 0;
  double seconds = 0.0;  // selection wall time; excluded from deterministic outputs
};

struct MethodResult {
  std::string method;
  std::vector<DatasetResult> rows;

  double mean_ap_rank() const;
  double mean_ap() const;
  double mean_models_fitted() const;
  double mean_seconds() const;
};

/// Fold-independent artifacts shared by every LOOCV fold: per-dataset scores
/// of every model, their tau-b matrices and the full performance matrix.
struct LoocvContext {
  GridSpec grid;
  ModelSet models;
  std::vector<Dataset> datasets;
  ScoreTable cache;
  PerformanceMatrix performance;
};

LoocvContext prepare_loocv(std::vector<Dataset> datasets, const GridSpec& grid,
                           const HarnessConfig& config);

struct Fold {
  std::size_t held_out = 0;
  std::vector<std::size_t> train;  // rows of the context
  MetaLearner learner;
  double train_seconds = 0.0;
};

// One meta-learner per held-out dataset, trained on the remaining datasets.
std::vector<Fold> train_folds(const LoocvContext& ctx, const HarnessConfig& config);

struct LoocvOutput {
  std::vector<MethodResult> results;  // in the order requested
  // traces[method][dataset_id] for the ELECT variants.
  std::map<std::string, std::map<std::string, SelectionTrace>> traces;
};

LoocvOutput loocv_evaluate(const LoocvContext& ctx, const std::vector<Fold>& folds,
                           const HarnessConfig& config, const std::vector<Method>& methods);
// Convenience: prepare, train every fold, evaluate.
LoocvOutput loocv_evaluate(std::vector<Dataset> datasets, const GridSpec& grid,
                           const HarnessConfig& config, const std::vector<Method>& methods);

// One baseline or ELECT run on a held-out dataset of a fold.
DatasetResult run_method(const LoocvContext& ctx, const Fold& fold, Method method,
                         const HarnessConfig& config, SelectionTrace* trace = nullptr);

struct Comparison {
  std::string method_a;
  std::string method_b;
  std::size_t n = 0;
  double statistic = 0.0;
  double p_value = 1.0;
  int direction = 0;  // sign of the median AP-rank difference a - b; < 0 favors a
  std::string verdict;
};

// Paired Wilcoxon signed-rank test on AP-ranks.
Comparison compare_methods(const MethodResult& a, const MethodResult& b);

// Mean weighted Kendall tau between the test task's true performance row and
// the rows of the named neighbors, over every model pair.
double ground_truth_neighbor_tau(const PerformanceMatrix& perf, const std::string& test_id,
                                 const std::vector<std::string>& neighbor_ids);

}  // namespace elect
