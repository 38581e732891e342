#include <cstdlib>
#include <cstring>

#include "variants.hpp"

namespace lidar_anchor::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(LIDAR_ANCHOR_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const KernelTable& select() {
  const char* forced = std::getenv("LIDAR_ANCHOR_SIMD");
  if (forced && std::strcmp(forced, "scalar") == 0) return scalar();
#if defined(LIDAR_ANCHOR_HAVE_AVX2)
  if (cpu_has_avx2()) return avx2_table();
#endif
  return scalar();
}

}  // namespace

std::vector<const KernelTable*> available() {
  std::vector<const KernelTable*> out;
#if defined(LIDAR_ANCHOR_HAVE_AVX2)
  if (cpu_has_avx2()) out.push_back(&avx2_table());
#endif
  return out;
}

const KernelTable& active() {
  static const KernelTable& table = select();
  return table;
}

}  // namespace lidar_anchor::kernels
