#include "lidar_anchor/raster_ops.hpp"

#include <algorithm>
#include <cmath>

#include "lidar_anchor/kernels.hpp"

namespace lidar_anchor {

std::optional<double> sample_bilinear(const HeightRaster& raster, double x, double y) {
  const RasterHeader& h = raster.header;
  if (!h.contains(x, y)) throw DomainError("sample_bilinear: point outside raster");
  const Point p = h.to_pixel(x, y);
  const double fc = p.x - 0.5;
  const double fr = p.y - 0.5;
  const double c0f = std::floor(fc);
  const double r0f = std::floor(fr);
  const double tx = fc - c0f;
  const double ty = fr - r0f;
  const int c0 = static_cast<int>(c0f);
  const int r0 = static_cast<int>(r0f);

  const int cols[2] = {std::clamp(c0, 0, h.width - 1), std::clamp(c0 + 1, 0, h.width - 1)};
  const int rows[2] = {std::clamp(r0, 0, h.height - 1), std::clamp(r0 + 1, 0, h.height - 1)};
  const double wx[2] = {1.0 - tx, tx};
  const double wy[2] = {1.0 - ty, ty};

  double sum = 0.0;
  double weight = 0.0;
  for (int j = 0; j < 2; ++j) {
    for (int i = 0; i < 2; ++i) {
      const double w = wx[i] * wy[j];
      if (w <= 0.0) continue;
      const float v = raster.at(cols[i], rows[j]);
      if (raster.is_nodata(v)) continue;
      sum += w * static_cast<double>(v);
      weight += w;
    }
  }
  if (weight <= 0.0) return std::nullopt;
  return sum / weight;
}

template <typename T>
Patch<T> extract_window(const Raster<T>& raster, int center_col, int center_row, int size) {
  if (size < 1) throw DomainError("extract_window: size must be at least 1");
  if (!raster.header.contains_pixel(center_col, center_row)) {
    throw DomainError("extract_window: center outside raster");
  }
  Patch<T> patch;
  patch.size = size;
  patch.bands = raster.bands();
  patch.values.resize(static_cast<std::size_t>(size) * size * patch.bands);
  const int top = center_row - size / 2;
  const int left = center_col - size / 2;
  for (int r = 0; r < size; ++r) {
    const int src_r = std::clamp(top + r, 0, raster.height() - 1);
    for (int c = 0; c < size; ++c) {
      const int src_c = std::clamp(left + c, 0, raster.width() - 1);
      for (int b = 0; b < patch.bands; ++b) patch.at(c, r, b) = raster.at(src_c, src_r, b);
    }
  }
  return patch;
}

template Patch<float> extract_window<float>(const Raster<float>&, int, int, int);
template Patch<std::uint8_t> extract_window<std::uint8_t>(const Raster<std::uint8_t>&, int, int, int);

Patch<double> height_patch(const Patch<float>& patch, const HeightRaster& source) {
  Patch<double> out{patch.size, patch.bands, {}};
  out.values.reserve(patch.values.size());
  for (float v : patch.values) {
    out.values.push_back(source.is_nodata(v) ? std::nan("") : static_cast<double>(v));
  }
  return out;
}

Patch<double> sobel_magnitude(const Patch<double>& patch) {
  const int n = patch.size;
  if (n < 3) throw DomainError("sobel_magnitude: patch must be at least 3x3");
  const int padded = n + 2;
  std::vector<double> buf(static_cast<std::size_t>(padded) * padded);
  for (int r = 0; r < padded; ++r) {
    const int sr = std::clamp(r - 1, 0, n - 1);
    for (int c = 0; c < padded; ++c) {
      const int sc = std::clamp(c - 1, 0, n - 1);
      buf[static_cast<std::size_t>(r) * padded + c] = patch.at(sc, sr);
    }
  }
  Patch<double> out{n, 1, std::vector<double>(static_cast<std::size_t>(n) * n)};
  const auto& k = kernels::active();
  for (int r = 0; r < n; ++r) {
    const double* up = &buf[static_cast<std::size_t>(r) * padded];
    k.sobel_row(up, up + padded, up + 2 * padded, &out.values[static_cast<std::size_t>(r) * n], n);
  }
  return out;
}

std::optional<double> footprint_mean(const HeightRaster& raster, double x, double y,
                                     double diameter) {
  const RasterHeader& h = raster.header;
  const double radius = 0.5 * diameter;
  const double nx = std::clamp(x, h.min_x(), h.max_x());
  const double ny = std::clamp(y, h.min_y(), h.max_y());
  if ((nx - x) * (nx - x) + (ny - y) * (ny - y) > radius * radius) {
    throw DomainError("footprint_mean: disk does not intersect raster");
  }
  const Point p = h.to_pixel(x, y);
  const double rpx = radius / h.gsd;
  const int c_lo = std::max(0, static_cast<int>(std::ceil(p.x - rpx - 0.5)) - 1);
  const int c_hi = std::min(h.width - 1, static_cast<int>(std::floor(p.x + rpx - 0.5)) + 1);
  const int r_lo = std::max(0, static_cast<int>(std::ceil(p.y - rpx - 0.5)) - 1);
  const int r_hi = std::min(h.height - 1, static_cast<int>(std::floor(p.y + rpx - 0.5)) + 1);

  const double r2 = radius * radius;
  double sum = 0.0;
  std::size_t inside = 0;
  std::size_t valid = 0;
  for (int r = r_lo; r <= r_hi; ++r) {
    for (int c = c_lo; c <= c_hi; ++c) {
      const Point cp = h.pixel_center(c, r);
      const double dx = cp.x - x;
      const double dy = cp.y - y;
      if (dx * dx + dy * dy > r2) continue;
      ++inside;
      const float v = raster.at(c, r);
      if (raster.is_nodata(v)) continue;
      sum += static_cast<double>(v);
      ++valid;
    }
  }
  if (inside == 0) {
    const auto px = h.containing_pixel(x, y);
    if (!px) return std::nullopt;
    const float v = raster.at(px->first, px->second);
    if (raster.is_nodata(v)) return std::nullopt;
    return static_cast<double>(v);
  }
  if (valid == 0) return std::nullopt;
  return sum / static_cast<double>(valid);
}

double percentile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw DomainError("percentile of an empty set");
  if (!(p >= 0.0 && p <= 100.0)) throw DomainError("percentile must lie in [0, 100]");
  const double rank = p / 100.0 * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

double percentile(std::vector<double> values, double p) {
  std::sort(values.begin(), values.end());
  return percentile_sorted(values, p);
}

}  // namespace lidar_anchor
