#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Inner-loop arithmetic kernels with a scalar reference implementation and an
// AVX2 variant chosen at runtime. Every variant performs the same sequence of
// IEEE operations per output element, so results are bit-identical across
// variants (the build disables FMA contraction).
namespace elect::simd {

enum class Isa { Scalar, Avx2 };

struct Kernels {
  Isa isa;
  const char* name;
  // out[i] = ||query - point_i||_2 for n points stored column-major
  // (feature f of point i at cols[f * n + i]).
  void (*euclidean_row)(const double* query, const double* cols, std::size_t n,
                        std::size_t d, double* out);
  // Same layout, L1 distance.
  void (*manhattan_row)(const double* query, const double* cols, std::size_t n,
                        std::size_t d, double* out);
  // Four interleaved partial sums combined as ((s0 + s1) + (s2 + s3)) + tail.
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*sum)(const double* a, std::size_t n);
};

const Kernels& scalar_kernels();
// Null when the translation unit was built without AVX2 support.
const Kernels* avx2_kernels();

bool supported(Isa isa);
// The kernels used by the library. AVX2 when the CPU supports it, unless the
// environment variable ELECT_SIMD=scalar forces the reference path.
const Kernels& active();
const Kernels& for_isa(Isa isa);
std::string_view isa_name(Isa isa);

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}
inline double sum(std::span<const double> a) { return active().sum(a.data(), a.size()); }

}  // namespace elect::simd
