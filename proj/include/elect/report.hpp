#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "elect/harness.hpp"

namespace elect {

// Report files written under a directory:
//   results.csv   method,dataset_id,selected,ap,ap_rank,models_fitted
//   summary.csv   method,datasets,mean_ap_rank,mean_ap,mean_models_fitted
//   pairs.csv     method_a,method_b,n,statistic,p_value,direction,verdict
//   timing.csv    method,dataset_id,seconds
//   traces/<dataset>.json for elect, traces/<method>/<dataset>.json for its variants
// Everything except timing.csv is a pure function of the inputs.
void emit_report(const LoocvOutput& output, const std::filesystem::path& dir);

std::string results_csv(const std::vector<MethodResult>& results);
std::string summary_csv(const std::vector<MethodResult>& results);
std::string pairs_csv(const std::vector<MethodResult>& results);
std::string timing_csv(const std::vector<MethodResult>& results);

// Parses results.csv (and timing.csv when present) back into method results.
std::vector<MethodResult> read_results(const std::filesystem::path& dir);
// Rewrites summary.csv and pairs.csv from results.csv.
void rerender_report(const std::filesystem::path& dir);

}  // namespace elect
