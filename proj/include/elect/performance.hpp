#pragma once

#include <span>
#include <string>
#include <vector>

#include "elect/core.hpp"
#include "elect/model_id.hpp"

namespace elect {

/// Ground-truth AP of every model (columns) on every meta-train task (rows).
struct PerformanceMatrix {
  Matrix values;
  std::vector<std::string> dataset_ids;
  ModelSet model_set;

  std::size_t tasks() const { return values.rows(); }
  std::size_t models() const { return values.cols(); }
  std::span<const double> row(std::size_t i) const { return values.row(i); }

  // Shape/label consistency and every entry in [0,1].
  void validate() const;
  // Rows restricted to the given task indices, in the given order.
  PerformanceMatrix select_rows(std::span<const std::size_t> rows) const;
  // Mean of each column.
  std::vector<double> column_means() const;
};

}  // namespace elect
