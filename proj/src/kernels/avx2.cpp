#include <immintrin.h>

#include <cmath>

#include "variants.hpp"

namespace lidar_anchor::kernels {
namespace {

// Each lane performs exactly the scalar operation sequence, so elementwise
// results match the reference bit for bit. Tails fall back to scalar code.

void sobel_row(const double* up, const double* mid, const double* down, double* out,
               std::size_t n) {
  const __m256d two = _mm256_set1_pd(2.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d u0 = _mm256_loadu_pd(up + i);
    const __m256d u1 = _mm256_loadu_pd(up + i + 1);
    const __m256d u2 = _mm256_loadu_pd(up + i + 2);
    const __m256d m0 = _mm256_loadu_pd(mid + i);
    const __m256d m2 = _mm256_loadu_pd(mid + i + 2);
    const __m256d d0 = _mm256_loadu_pd(down + i);
    const __m256d d1 = _mm256_loadu_pd(down + i + 1);
    const __m256d d2 = _mm256_loadu_pd(down + i + 2);
    const __m256d right = _mm256_add_pd(_mm256_add_pd(u2, _mm256_mul_pd(two, m2)), d2);
    const __m256d left = _mm256_add_pd(_mm256_add_pd(u0, _mm256_mul_pd(two, m0)), d0);
    const __m256d gx = _mm256_sub_pd(right, left);
    const __m256d bottom = _mm256_add_pd(_mm256_add_pd(d0, _mm256_mul_pd(two, d1)), d2);
    const __m256d top = _mm256_add_pd(_mm256_add_pd(u0, _mm256_mul_pd(two, u1)), u2);
    const __m256d gy = _mm256_sub_pd(bottom, top);
    const __m256d mag2 = _mm256_add_pd(_mm256_mul_pd(gx, gx), _mm256_mul_pd(gy, gy));
    _mm256_storeu_pd(out + i, _mm256_sqrt_pd(mag2));
  }
  for (; i < n; ++i) {
    const double gx = (up[i + 2] + 2.0 * mid[i + 2] + down[i + 2]) - (up[i] + 2.0 * mid[i] + down[i]);
    const double gy = (down[i] + 2.0 * down[i + 1] + down[i + 2]) - (up[i] + 2.0 * up[i + 1] + up[i + 2]);
    out[i] = std::sqrt(gx * gx + gy * gy);
  }
}

void convolve_row(const double* in, const double* w, std::size_t taps, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t k = 0; k < taps; ++k) {
      acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_set1_pd(w[k]), _mm256_loadu_pd(in + i + k)));
    }
    _mm256_storeu_pd(out + i, acc);
  }
  for (; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < taps; ++k) acc += w[k] * in[i + k];
    out[i] = acc;
  }
}

void convolve_cols(const double* const* rows, const double* w, std::size_t taps, double* out,
                   std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t k = 0; k < taps; ++k) {
      acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_set1_pd(w[k]), _mm256_loadu_pd(rows[k] + i)));
    }
    _mm256_storeu_pd(out + i, acc);
  }
  for (; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < taps; ++k) acc += w[k] * rows[k][i];
    out[i] = acc;
  }
}

// Lanes to keep unchanged: NaN inputs, plus nodata when configured.
inline __m256d passthrough_mask(__m256d v, bool has_nodata, __m256d nodata) {
  __m256d mask = _mm256_cmp_pd(v, v, _CMP_UNORD_Q);
  if (has_nodata) mask = _mm256_or_pd(mask, _mm256_cmp_pd(v, nodata, _CMP_EQ_OQ));
  return mask;
}

void affine_f32(const float* in, float* out, std::size_t n, double a, double b, bool has_nodata,
                float nodata) {
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(b);
  const __m256d vnd = _mm256_set1_pd(static_cast<double>(nodata));
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m128 raw = _mm_loadu_ps(in + i);
    const __m256d v = _mm256_cvtps_pd(raw);
    const __m128 res = _mm256_cvtpd_ps(_mm256_add_pd(_mm256_mul_pd(va, v), vb));
    const __m128 keep = _mm256_cvtpd_ps(passthrough_mask(v, has_nodata, vnd));
    _mm_storeu_ps(out + i, _mm_blendv_ps(res, raw, keep));
  }
  for (; i < n; ++i) {
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
  const __m256d zero = _mm256_setzero_pd();
  const __m256d vnd = _mm256_set1_pd(static_cast<double>(nodata));
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m128 raw = _mm_loadu_ps(pred + i);
    const __m256d v = _mm256_cvtps_pd(raw);
    const __m256d d = _mm256_sub_pd(v, _mm256_loadu_pd(residual + i));
    // max_pd returns the second operand for NaN or signed-zero pairs, matching
    // the scalar `d > 0 ? d : 0`.
    const __m128 res = _mm256_cvtpd_ps(_mm256_max_pd(d, zero));
    const __m128 keep = _mm256_cvtpd_ps(passthrough_mask(v, has_nodata, vnd));
    _mm_storeu_ps(out + i, _mm_blendv_ps(res, raw, keep));
  }
  for (; i < n; ++i) {
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
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d abs_acc = _mm256_setzero_pd();
  __m256d sq_acc = _mm256_setzero_pd();
  std::size_t count = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_cvtps_pd(_mm_loadu_ps(a + i)),
                                    _mm256_cvtps_pd(_mm_loadu_ps(b + i)));
    const __m256d m = _mm256_castsi256_pd(_mm256_set_epi64x(
        valid[i + 3] ? -1 : 0, valid[i + 2] ? -1 : 0, valid[i + 1] ? -1 : 0, valid[i] ? -1 : 0));
    const __m256d dm = _mm256_and_pd(d, m);
    abs_acc = _mm256_add_pd(abs_acc, _mm256_andnot_pd(sign, dm));
    sq_acc = _mm256_add_pd(sq_acc, _mm256_mul_pd(dm, dm));
    count += (valid[i] != 0) + (valid[i + 1] != 0) + (valid[i + 2] != 0) + (valid[i + 3] != 0);
  }
  alignas(32) double abs_l[4];
  alignas(32) double sq_l[4];
  _mm256_store_pd(abs_l, abs_acc);
  _mm256_store_pd(sq_l, sq_acc);
  DiffSums s;
  s.abs_sum = (abs_l[0] + abs_l[1]) + (abs_l[2] + abs_l[3]);
  s.sq_sum = (sq_l[0] + sq_l[1]) + (sq_l[2] + sq_l[3]);
  s.count = count;
  for (; i < n; ++i) {
    if (!valid[i]) continue;
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    s.abs_sum += std::fabs(d);
    s.sq_sum += d * d;
    ++s.count;
  }
  return s;
}

constexpr KernelTable kAvx2{
    "avx2", sobel_row, convolve_row, convolve_cols, affine_f32, subtract_clamp_f32, diff_sums,
};

}  // namespace

const KernelTable& avx2_table() { return kAvx2; }

}  // namespace lidar_anchor::kernels
