#include "elect/simd/kernels.hpp"

#if defined(ELECT_HAVE_AVX2_TU) && defined(__AVX2__)

#include <immintrin.h>

#include <cmath>

namespace elect::simd {
namespace {

// Four points per vector; each lane accumulates its point's features in
// ascending order, matching the scalar loop exactly.
void euclidean_row(const double* query, const double* cols, std::size_t n, std::size_t d,
                   double* out) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t f = 0; f < d; ++f) {
      __m256d diff = _mm256_sub_pd(_mm256_loadu_pd(cols + f * n + i), _mm256_set1_pd(query[f]));
      acc = _mm256_add_pd(acc, _mm256_mul_pd(diff, diff));
    }
    _mm256_storeu_pd(out + i, _mm256_sqrt_pd(acc));
  }
  for (; i < n; ++i) {
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
  const __m256d sign = _mm256_set1_pd(-0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t f = 0; f < d; ++f) {
      __m256d diff = _mm256_sub_pd(_mm256_loadu_pd(cols + f * n + i), _mm256_set1_pd(query[f]));
      acc = _mm256_add_pd(acc, _mm256_andnot_pd(sign, diff));
    }
    _mm256_storeu_pd(out + i, acc);
  }
  for (; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t f = 0; f < d; ++f) acc += std::fabs(cols[f * n + i] - query[f]);
    out[i] = acc;
  }
}

double reduce(__m256d acc, double tail) {
  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc);
  return ((lane[0] + lane[1]) + (lane[2] + lane[3])) + tail;
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  double tail = 0.0;
  for (; i < n; ++i) tail += a[i] * b[i];
  return reduce(acc, tail);
}

double sum(const double* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
  double tail = 0.0;
  for (; i < n; ++i) tail += a[i];
  return reduce(acc, tail);
}

const Kernels kAvx2{Isa::Avx2, "avx2", euclidean_row, manhattan_row, dot, sum};

}  // namespace

const Kernels* avx2_kernels() { return &kAvx2; }

}  // namespace elect::simd

#else

namespace elect::simd {
const Kernels* avx2_kernels() { return nullptr; }
}  // namespace elect::simd

#endif
