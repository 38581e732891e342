#pragma once

#include "lidar_anchor/kernels.hpp"

namespace lidar_anchor::kernels {

#if defined(LIDAR_ANCHOR_HAVE_AVX2)
/// Defined in avx2.cpp, which is compiled with -mavx2 (no FMA).
const KernelTable& avx2_table();
#endif

}  // namespace lidar_anchor::kernels
