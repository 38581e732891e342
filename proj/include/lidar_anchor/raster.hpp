#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <limits>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "lidar_anchor/error.hpp"

namespace lidar_anchor {

enum class DType { float32, uint8 };

std::string to_string(DType t);
DType dtype_from_string(const std::string& s);

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Georeferenced grid geometry. Pixel (col,row) has its center at
/// (origin_x + (col+0.5)*gsd, origin_y - (row+0.5)*gsd); rows run south.
struct RasterHeader {
  int width = 0;
  int height = 0;
  double gsd = 1.0;
  double origin_x = 0.0;
  double origin_y = 0.0;
  int crs_code = 0;
  std::optional<double> nodata;
  int bands = 1;
  DType dtype = DType::float32;
  /// Pixels per embedding cell; present only for embedding grids.
  std::optional<int> cell_px;

  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  std::size_t element_count() const noexcept { return pixel_count() * static_cast<std::size_t>(bands); }

  Point pixel_center(int col, int row) const noexcept {
    return {origin_x + (col + 0.5) * gsd, origin_y - (row + 0.5) * gsd};
  }
  /// Continuous pixel coordinates; integer values fall on pixel edges.
  Point to_pixel(double x, double y) const noexcept {
    return {(x - origin_x) / gsd, (origin_y - y) / gsd};
  }
  double min_x() const noexcept { return origin_x; }
  double max_x() const noexcept { return origin_x + width * gsd; }
  double min_y() const noexcept { return origin_y - height * gsd; }
  double max_y() const noexcept { return origin_y; }

  bool contains(double x, double y) const noexcept {
    return x >= min_x() && x <= max_x() && y >= min_y() && y <= max_y();
  }
  bool contains_pixel(int col, int row) const noexcept {
    return col >= 0 && row >= 0 && col < width && row < height;
  }
  /// Pixel whose area contains (x,y); points on the far edges map to the last pixel.
  std::optional<std::pair<int, int>> containing_pixel(double x, double y) const noexcept;

  bool same_geometry(const RasterHeader& other) const noexcept;

  /// Throws FormatError when a field is out of range.
  void validate() const;
};

/// Row-major raster. Multi-band float data is band-sequential; multi-band
/// uint8 data (optical RGB) is pixel-interleaved.
template <typename T>
struct Raster {
  RasterHeader header;
  std::vector<T> values;

  int width() const noexcept { return header.width; }
  int height() const noexcept { return header.height; }
  int bands() const noexcept { return header.bands; }

  std::size_t index(int col, int row, int band = 0) const noexcept {
    const auto w = static_cast<std::size_t>(header.width);
    const auto pix = static_cast<std::size_t>(row) * w + static_cast<std::size_t>(col);
    if constexpr (std::is_same_v<T, std::uint8_t>) {
      return pix * static_cast<std::size_t>(header.bands) + static_cast<std::size_t>(band);
    } else {
      return static_cast<std::size_t>(band) * header.pixel_count() + pix;
    }
  }
  T at(int col, int row, int band = 0) const noexcept { return values[index(col, row, band)]; }
  T& at(int col, int row, int band = 0) noexcept { return values[index(col, row, band)]; }

  bool is_nodata(T v) const noexcept {
    if constexpr (std::is_floating_point_v<T>) {
      if (std::isnan(v)) return true;
      return header.nodata && static_cast<double>(v) == *header.nodata;
    } else {
      return header.nodata && static_cast<double>(v) == *header.nodata;
    }
  }
  bool valid(int col, int row, int band = 0) const noexcept { return !is_nodata(at(col, row, band)); }

  /// Value to write into invalid cells of derived rasters.
  T nodata_value() const noexcept {
    if (header.nodata) return static_cast<T>(*header.nodata);
    if constexpr (std::is_floating_point_v<T>) return std::numeric_limits<T>::quiet_NaN();
    return T{};
  }
};

using HeightRaster = Raster<float>;
using LandCoverRaster = Raster<std::uint8_t>;
using OpticalRaster = Raster<std::uint8_t>;

/// Land-cover class codes.
enum class LandCover : std::uint8_t {
  bareland = 0,
  rangeland = 1,
  developed = 2,
  road = 3,
  tree = 4,
  water = 5,
  agriculture = 6,
  building = 7,
};
inline constexpr int kLandCoverClasses = 8;
const char* land_cover_name(int code);

/// d-dimensional embedding per cell of cell_px x cell_px image pixels.
struct EmbeddingGrid {
  Raster<float> grid;
  int cell_px = 14;

  int dim() const noexcept { return grid.header.bands; }
  int cells_x() const noexcept { return grid.header.width; }
  int cells_y() const noexcept { return grid.header.height; }
  /// Image size in pixels this grid is able to describe.
  bool covers(int image_width, int image_height) const noexcept;
};

/// Builds a header for a fresh raster with the given geometry.
RasterHeader make_header(int width, int height, double gsd, double origin_x, double origin_y,
                         int crs_code, int bands, DType dtype,
                         std::optional<double> nodata = std::nullopt);

template <typename T>
Raster<T> make_raster(const RasterHeader& header, T fill = T{}) {
  return Raster<T>{header, std::vector<T>(header.element_count(), fill)};
}

/// Throws DomainError unless both rasters share width, height, gsd, origin and CRS.
void require_same_geometry(const RasterHeader& a, const RasterHeader& b, const char* what);

}  // namespace lidar_anchor
