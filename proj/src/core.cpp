#include "elect/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace elect {

namespace {

std::string describe(const std::string& file, std::size_t row, std::size_t column,
                     const std::string& what) {
  std::ostringstream os;
  os << file;
  if (row > 0) os << ": row " << row;
  if (column > 0) os << ", column " << column;
  os << ": " << what;
  return os.str();
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

bool parse_number(std::string_view cell, double& out) {
  cell = trim(cell);
  if (cell.empty()) return false;
  if (cell.front() == '+') cell.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return ec == std::errc() && ptr == cell.data() + cell.size();
}

}  // namespace

ParseError::ParseError(std::string file, std::size_t row, std::size_t column,
                       const std::string& what)
    : Error(describe(file, row, column, what)),
      file_(std::move(file)),
      row_(row),
      column_(column) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw ValidationError("matrix data size does not match its shape");
  }
}

std::vector<double> Matrix::transposed() const {
  std::vector<double> out(data_.size());
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) out[c * rows_ + r] = data_[r * cols_ + c];
  return out;
}

void Dataset::validate() const {
  if (x.rows() < 2) throw ValidationError("dataset '" + id + "' needs at least 2 samples");
  if (x.cols() < 1) throw ValidationError("dataset '" + id + "' needs at least 1 feature");
  for (double v : x.data()) {
    if (!std::isfinite(v))
      throw ValidationError("dataset '" + id + "' contains a non-finite feature");
  }
  if (labels && labels->size() != x.rows())
    throw ValidationError("dataset '" + id + "' label count differs from sample count");
}

void Dataset::validate_for_evaluation() const {
  validate();
  if (!labels) throw ValidationError("dataset '" + id + "' is unlabeled");
  std::size_t pos = 0;
  for (auto l : *labels) pos += l;
  if (pos == 0 || pos == labels->size())
    throw ValidationError("dataset '" + id + "' needs both inliers and outliers");
}

UnlabeledDataset strip_labels(const Dataset& d) { return {d.id, d.x}; }

Dataset parse_dataset(const std::string& text, const std::string& id, bool has_labels,
                      const std::string& source) {
  std::vector<double> values;
  std::vector<std::uint8_t> labels;
  std::size_t width = 0;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    ++rows;
    std::size_t col = 0;
    std::string_view rest(line);
    std::vector<double> cells;
    while (true) {
      auto comma = rest.find(',');
      auto cell = rest.substr(0, comma);
      ++col;
      double v = 0.0;
      if (!parse_number(cell, v) || !std::isfinite(v))
        throw ParseError(source, line_no, col, "non-numeric cell '" + std::string(trim(cell)) + "'");
      cells.push_back(v);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (width == 0) {
      width = cells.size();
      if (has_labels && width < 2)
        throw ParseError(source, line_no, 0, "labeled rows need at least one feature and a label");
    } else if (cells.size() != width) {
      throw ParseError(source, line_no, 0,
                       "ragged row: expected " + std::to_string(width) + " cells, got " +
                           std::to_string(cells.size()));
    }
    std::size_t features = has_labels ? width - 1 : width;
    values.insert(values.end(), cells.begin(), cells.begin() + static_cast<long>(features));
    if (has_labels) {
      double l = cells.back();
      if (l != 0.0 && l != 1.0)
        throw ParseError(source, line_no, width, "label outside {0,1}");
      labels.push_back(static_cast<std::uint8_t>(l));
    }
  }
  if (rows == 0) throw ParseError(source, 0, 0, "empty file");
  std::size_t features = has_labels ? width - 1 : width;
  Dataset d{id, Matrix(rows, features, std::move(values)), std::nullopt};
  if (has_labels) d.labels = std::move(labels);
  return d;
}

Dataset load_dataset(const std::filesystem::path& path, bool has_labels) {
  return parse_dataset(read_file(path), path.stem().string(), has_labels, path.string());
}

void save_dataset(const Dataset& d, const std::filesystem::path& path) {
  std::string out;
  for (std::size_t r = 0; r < d.rows(); ++r) {
    for (std::size_t c = 0; c < d.cols(); ++c) {
      if (c) out += ',';
      out += format_double(d.x(r, c));
    }
    if (d.labels) {
      out += ',';
      out += (*d.labels)[r] ? '1' : '0';
    }
    out += '\n';
  }
  write_file(path, out);
}

double mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

double population_stddev(std::span<const double> values) {
  if (values.empty()) return 0.0;
  double mu = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - mu) * (v - mu);
  return std::sqrt(ss / static_cast<double>(values.size()));
}

std::vector<double> znormalize(std::span<const double> values) {
  for (double v : values)
    if (!std::isfinite(v)) throw ValidationError("znormalize: non-finite input");
  std::vector<double> out(values.size(), 0.0);
  if (values.empty()) return out;
  double mu = mean(values);
  bool constant = std::all_of(values.begin(), values.end(),
                              [&](double v) { return v == values.front(); });
  if (constant) return out;
  double sigma = population_stddev(values);
  if (sigma == 0.0) return out;
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - mu) / sigma;
  return out;
}

std::vector<double> minmax_normalize(std::span<const double> values) {
  std::vector<double> out(values.size(), 0.0);
  if (values.empty()) return out;
  auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  double range = *hi - *lo;
  if (range <= 0.0) return out;
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - *lo) / range;
  return out;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << contents;
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

}  // namespace elect
