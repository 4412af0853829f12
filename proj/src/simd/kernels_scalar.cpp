#include <cmath>

#include "elect/simd/kernels.hpp"

namespace elect::simd {
namespace {

void euclidean_row(const double* query, const double* cols, std::size_t n, std::size_t d,
                   double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t f = 0; f < d; ++f) {
      double diff = cols[f * n + i] - query[f];
      acc += diff * diff;
    }
    out[i] = std::sqrt(acc);
  }
}

void manhattan_row(const double* query, const double* cols, std::size_t n, std::size_t d,
                   double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t f = 0; f < d; ++f) acc += std::fabs(cols[f * n + i] - query[f]);
    out[i] = acc;
  }
}

double dot(const double* a, const double* b, std::size_t n) {
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    for (int l = 0; l < 4; ++l) lane[l] += a[i + l] * b[i + l];
  double tail = 0.0;
  for (; i < n; ++i) tail += a[i] * b[i];
  return ((lane[0] + lane[1]) + (lane[2] + lane[3])) + tail;
}

double sum(const double* a, std::size_t n) {
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    for (int l = 0; l < 4; ++l) lane[l] += a[i + l];
  double tail = 0.0;
  for (; i < n; ++i) tail += a[i];
  return ((lane[0] + lane[1]) + (lane[2] + lane[3])) + tail;
}

const Kernels kScalar{Isa::Scalar, "scalar", euclidean_row, manhattan_row, dot, sum};

}  // namespace

const Kernels& scalar_kernels() { return kScalar; }

}  // namespace elect::simd
