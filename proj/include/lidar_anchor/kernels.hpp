#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace lidar_anchor::kernels {

struct DiffSums {
  double abs_sum = 0.0;
  double sq_sum = 0.0;
  std::size_t count = 0;
};

/// Hot inner loops with one scalar reference and optional vector variants.
/// Elementwise kernels (everything except diff_sums) must be bit-identical
/// across variants; diff_sums reorders its reduction and only agrees to
/// floating tolerance.
struct KernelTable {
  const char* name;

  /// 3x3 Sobel gradient magnitude for one output row. `up`, `mid` and `down`
  /// point at rows padded by one element on each side (n + 2 readable values).
  void (*sobel_row)(const double* up, const double* mid, const double* down, double* out,
                    std::size_t n);

  /// out[i] = sum_k w[k] * in[i + k] for k in [0, taps), accumulated in k order.
  void (*convolve_row)(const double* in, const double* w, std::size_t taps, double* out,
                       std::size_t n);

  /// out[i] = sum_k w[k] * rows[k][i], accumulated in k order.
  void (*convolve_cols)(const double* const* rows, const double* w, std::size_t taps,
                        double* out, std::size_t n);

  /// out[i] = float(a * in[i] + b) in double precision; NaN and nodata pass through.
  void (*affine_f32)(const float* in, float* out, std::size_t n, double a, double b,
                     bool has_nodata, float nodata);

  /// out[i] = float(max(pred[i] - residual[i], 0)); NaN and nodata pass through.
  void (*subtract_clamp_f32)(const float* pred, const double* residual, float* out,
                             std::size_t n, bool has_nodata, float nodata);

  /// Sums of |a-b| and (a-b)^2 over entries with valid[i] != 0.
  DiffSums (*diff_sums)(const float* a, const float* b, const std::uint8_t* valid, std::size_t n);
};

const KernelTable& scalar();

/// Vector variants compiled into this binary that the running CPU supports.
std::vector<const KernelTable*> available();

/// Table used by the library: the widest supported variant, unless the
/// environment variable LIDAR_ANCHOR_SIMD=scalar forces the reference path.
const KernelTable& active();

}  // namespace lidar_anchor::kernels
