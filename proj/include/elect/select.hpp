#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "elect/core.hpp"
#include "elect/ipm.hpp"
#include "elect/meta_train.hpp"
#include "elect/similarity.hpp"

namespace elect {

enum class AcquisitionKind { EI, Sum, Greedy };
enum class InitKind { Coverage, Random };

std::string_view acquisition_name(AcquisitionKind k);
AcquisitionKind parse_acquisition(std::string_view name);

// Greedy seeding so that each task's best and worst models are represented.
// A task is covered when both its top and bottom model are in the subset
// (`strict`), or when at least one of them is. Remaining slots go to the
// best column means.
std::vector<std::size_t> coverage_init(const PerformanceMatrix& perf, std::size_t init_size,
                                       bool strict = true);
// Uniform draw of init_size distinct models, returned in ascending order.
std::vector<std::size_t> random_init(std::size_t m, std::size_t init_size, std::uint64_t seed);

struct NeighborStats {
  double mu = 0.0;
  double sigma = 0.0;  // population
};
NeighborStats neighbor_stats(const PerformanceMatrix& perf, std::span<const std::size_t> neighbors,
                             std::size_t j);

// sigma * (u Phi(u) + phi(u)), u = (mu - mu_star) / sigma; 0 when sigma = 0.
double expected_improvement(double mu, double sigma, double mu_star);

struct AcquisitionChoice {
  std::size_t model = 0;
  double value = 0.0;
};
// Best model outside `subset`; ties go to the lowest index.
AcquisitionChoice acquisition(const PerformanceMatrix& perf, std::span<const std::size_t> neighbors,
                              std::span<const std::size_t> subset, AcquisitionKind kind);

// Model with the largest mean performance over the neighbors.
std::size_t best_on_neighbors(const PerformanceMatrix& perf, std::span<const std::size_t> neighbors);

struct SelectOptions {
  std::optional<std::size_t> budget;    // defaults to the bundle's hyperparameters
  std::optional<std::size_t> patience;
  AcquisitionKind acquisition = AcquisitionKind::EI;
  InitKind init = InitKind::Coverage;
  bool strict_coverage = true;
  std::uint64_t seed = 0;  // random init only
  // Per-model AP on the test task, for analysis only; fills trace AP-ranks.
  std::optional<std::vector<double>> analysis_ap;
};

struct TraceRecord {
  std::size_t iteration = 0;  // 1-based
  std::vector<std::size_t> subset;
  std::vector<std::size_t> neighbor_indices;
  std::vector<std::string> neighbor_ids;
  std::vector<double> neighbor_taus;
  std::size_t selected = 0;
  std::optional<std::size_t> added;
  double acquisition_value = 0.0;
  std::optional<double> ap_rank;
};

struct SelectionTrace {
  std::string dataset_id;
  std::string acquisition;
  std::vector<std::string> models;  // canonical strings, by model index
  std::vector<std::size_t> anchors;
  std::vector<std::size_t> fitted;  // fit order on the test task, no repeats
  std::vector<TraceRecord> records;

  std::size_t selected() const { return records.back().selected; }
  const std::string& selected_model() const { return models[selected()]; }
};

struct SelectionResult {
  ModelId model;
  SelectionTrace trace;
};

// Scores of model j on the test task, z-normalized. Called at most once per model.
using ScoreProvider = std::function<std::vector<double>(std::size_t)>;

SelectionResult adaptive_select(const UnlabeledDataset& test, const MetaLearner& ml,
                                const SelectOptions& options = {});
SelectionResult adaptive_select(const std::string& dataset_id, const ScoreProvider& scores,
                                const MetaLearner& ml, const SelectOptions& options = {});

std::string trace_to_json(const SelectionTrace& trace);
SelectionTrace trace_from_json(const std::string& text);
// One row per iteration: iteration,subset_size,neighbors,mean_tau_hat,selected,added,
// acquisition_value,ap_rank. Neighbor ids are joined with ";".
std::string trace_to_csv(const SelectionTrace& trace);

}  // namespace elect
