#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace elect {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised for malformed input files. Row and column are 1-based; 0 means
// "not applicable".
class ParseError : public Error {
 public:
  ParseError(std::string file, std::size_t row, std::size_t column,
             const std::string& what);
  const std::string& file() const { return file_; }
  std::size_t row() const { return row_; }
  std::size_t column() const { return column_; }

 private:
  std::string file_;
  std::size_t row_;
  std::size_t column_;
};

// Precondition or invariant violation on otherwise well-formed data.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  // Column-major copy, used by the vectorized distance kernels.
  std::vector<double> transposed() const;

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// A task: samples with optional binary outlier labels (1 = outlier).
struct Dataset {
  std::string id;
  Matrix x;
  std::optional<std::vector<std::uint8_t>> labels;

  std::size_t rows() const { return x.rows(); }
  std::size_t cols() const { return x.cols(); }
  bool labeled() const { return labels.has_value(); }

  // Throws ValidationError unless r >= 2, d >= 1, features are finite and
  // labels (if present) have length r.
  void validate() const;
  // Additionally requires both classes to be present.
  void validate_for_evaluation() const;

  bool operator==(const Dataset&) const = default;
};

/// A dataset with its labels removed. Model selection only ever sees this
/// type, so held-out labels cannot leak into it.
struct UnlabeledDataset {
  std::string id;
  Matrix x;

  std::size_t rows() const { return x.rows(); }
  std::size_t cols() const { return x.cols(); }
};

UnlabeledDataset strip_labels(const Dataset& d);

// Header-less numeric CSV, one sample per row, label column last when
// `has_labels`. The dataset id is the file stem.
Dataset load_dataset(const std::filesystem::path& path, bool has_labels);
Dataset parse_dataset(const std::string& text, const std::string& id,
                      bool has_labels, const std::string& source = "<memory>");
// Writes 17 significant digits so that load_dataset reproduces the values.
void save_dataset(const Dataset& d, const std::filesystem::path& path);

// (x - mean) / population stddev; constant input maps to all zeros.
std::vector<double> znormalize(std::span<const double> values);

// Maps to [0,1]; constant input maps to all zeros.
std::vector<double> minmax_normalize(std::span<const double> values);

double mean(std::span<const double> values);
double population_stddev(std::span<const double> values);

// Formats a double with 17 significant digits.
std::string format_double(double v);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace elect
