#include <cmath>

#include "variants.hpp"

namespace lidar_anchor::kernels {
namespace {

void sobel_row(const double* up, const double* mid, const double* down, double* out,
               std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double gx = (up[i + 2] + 2.0 * mid[i + 2] + down[i + 2]) - (up[i] + 2.0 * mid[i] + down[i]);
    const double gy = (down[i] + 2.0 * down[i + 1] + down[i + 2]) - (up[i] + 2.0 * up[i + 1] + up[i + 2]);
    out[i] = std::sqrt(gx * gx + gy * gy);
  }
}

void convolve_row(const double* in, const double* w, std::size_t taps, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < taps; ++k) acc += w[k] * in[i + k];
    out[i] = acc;
  }
}

void convolve_cols(const double* const* rows, const double* w, std::size_t taps, double* out,
                   std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < taps; ++k) acc += w[k] * rows[k][i];
    out[i] = acc;
  }
}

void affine_f32(const float* in, float* out, std::size_t n, double a, double b, bool has_nodata,
                float nodata) {
  for (std::size_t i = 0; i < n; ++i) {
    const float v = in[i];
    if (std::isnan(v) || (has_nodata && v == nodata)) {
      out[i] = v;
    } else {
      out[i] = static_cast<float>(a * static_cast<double>(v) + b);
    }
  }
}

void subtract_clamp_f32(const float* pred, const double* residual, float* out, std::size_t n,
                        bool has_nodata, float nodata) {
  for (std::size_t i = 0; i < n; ++i) {
    const float v = pred[i];
    if (std::isnan(v) || (has_nodata && v == nodata)) {
      out[i] = v;
    } else {
      const double d = static_cast<double>(v) - residual[i];
      out[i] = static_cast<float>(d > 0.0 ? d : 0.0);
    }
  }
}

DiffSums diff_sums(const float* a, const float* b, const std::uint8_t* valid, std::size_t n) {
  DiffSums s;
  for (std::size_t i = 0; i < n; ++i) {
    if (!valid[i]) continue;
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    s.abs_sum += std::fabs(d);
    s.sq_sum += d * d;
    ++s.count;
  }
  return s;
}

constexpr KernelTable kScalar{
    "scalar", sobel_row, convolve_row, convolve_cols, affine_f32, subtract_clamp_f32, diff_sums,
};

}  // namespace

const KernelTable& scalar() { return kScalar; }

}  // namespace lidar_anchor::kernels
