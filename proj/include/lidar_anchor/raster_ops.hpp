#pragma once

#include <optional>
#include <span>
#include <vector>

#include "lidar_anchor/raster.hpp"

namespace lidar_anchor {

/// Square size x size window, pixel-interleaved when bands > 1.
template <typename T>
struct Patch {
  int size = 0;
  int bands = 1;
  std::vector<T> values;

  T at(int col, int row, int band = 0) const noexcept {
    return values[(static_cast<std::size_t>(row) * size + col) * bands + band];
  }
  T& at(int col, int row, int band = 0) noexcept {
    return values[(static_cast<std::size_t>(row) * size + col) * bands + band];
  }
};

/// Bilinear interpolation between the four surrounding pixel centers.
/// Nodata neighbors are dropped and the remaining weights renormalized;
/// returns nullopt when no neighbor with positive weight is valid.
/// Throws DomainError when (x,y) lies outside the raster extent.
std::optional<double> sample_bilinear(const HeightRaster& raster, double x, double y);

/// size x size window whose pixel (size/2, size/2) is (center_col, center_row).
/// Pixels beyond the raster repeat the nearest edge pixel.
template <typename T>
Patch<T> extract_window(const Raster<T>& raster, int center_col, int center_row, int size);

/// Converts a height window to double, marking nodata cells as NaN.
Patch<double> height_patch(const Patch<float>& patch, const HeightRaster& source);

/// Sobel gradient magnitude sqrt(gx^2 + gy^2) with edge replication.
/// Throws DomainError for patches smaller than 3x3.
Patch<double> sobel_magnitude(const Patch<double>& patch);

/// Mean of valid pixels whose centers lie within the disk. A disk too small to
/// contain any pixel center yields the containing pixel's value. Returns
/// nullopt when every candidate pixel is nodata; throws DomainError when the
/// disk does not intersect the raster.
std::optional<double> footprint_mean(const HeightRaster& raster, double x, double y,
                                     double diameter);

/// Percentile p in [0,100] of ascending data, interpolating linearly between
/// the closest order statistics (rank p/100 * (n-1)).
double percentile_sorted(std::span<const double> sorted, double p);

/// Same as percentile_sorted on a copy it sorts itself.
double percentile(std::vector<double> values, double p);

}  // namespace lidar_anchor
