#include <cstdlib>
#include <string>

#include "elect/simd/kernels.hpp"

namespace elect::simd {

bool supported(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(__x86_64__) || defined(__i386__)
      return avx2_kernels() != nullptr && __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

const Kernels& for_isa(Isa isa) {
  if (isa == Isa::Avx2 && supported(Isa::Avx2)) return *avx2_kernels();
  return scalar_kernels();
}

const Kernels& active() {
  static const Kernels& chosen = [] () -> const Kernels& {
    const char* env = std::getenv("ELECT_SIMD");
    if (env && std::string(env) == "scalar") return scalar_kernels();
    return for_isa(Isa::Avx2);
  }();
  return chosen;
}

std::string_view isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

}  // namespace elect::simd
