#include "lidar_anchor/raster.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace lidar_anchor {

std::string to_string(DType t) {
  return t == DType::float32 ? "float32" : "uint8";
}

DType dtype_from_string(const std::string& s) {
  if (s == "float32") return DType::float32;
  if (s == "uint8") return DType::uint8;
  throw FormatError("unsupported raster dtype '" + s + "'");
}

const char* land_cover_name(int code) {
  static constexpr const char* kNames[kLandCoverClasses] = {
      "bareland", "rangeland", "developed", "road", "tree", "water", "agriculture", "building"};
  if (code < 0 || code >= kLandCoverClasses) return "unknown";
  return kNames[code];
}

std::optional<std::pair<int, int>> RasterHeader::containing_pixel(double x, double y) const noexcept {
  if (!contains(x, y)) return std::nullopt;
  const Point p = to_pixel(x, y);
  int col = static_cast<int>(std::floor(p.x));
  int row = static_cast<int>(std::floor(p.y));
  col = std::clamp(col, 0, width - 1);
  row = std::clamp(row, 0, height - 1);
  return std::pair{col, row};
}

bool RasterHeader::same_geometry(const RasterHeader& o) const noexcept {
  return width == o.width && height == o.height && gsd == o.gsd && origin_x == o.origin_x &&
         origin_y == o.origin_y && crs_code == o.crs_code;
}

void RasterHeader::validate() const {
  if (width <= 0 || height <= 0) throw FormatError("raster width and height must be positive");
  if (!(gsd > 0.0) || !std::isfinite(gsd)) throw FormatError("raster gsd must be positive");
  if (bands <= 0) throw FormatError("raster band count must be positive");
  if (!std::isfinite(origin_x) || !std::isfinite(origin_y)) {
    throw FormatError("raster origin must be finite");
  }
  if (cell_px && *cell_px <= 0) throw FormatError("cell_px must be positive");
}

bool EmbeddingGrid::covers(int image_width, int image_height) const noexcept {
  return cells_x() == (image_width + cell_px - 1) / cell_px &&
         cells_y() == (image_height + cell_px - 1) / cell_px;
}

RasterHeader make_header(int width, int height, double gsd, double origin_x, double origin_y,
                         int crs_code, int bands, DType dtype, std::optional<double> nodata) {
  RasterHeader h;
  h.width = width;
  h.height = height;
  h.gsd = gsd;
  h.origin_x = origin_x;
  h.origin_y = origin_y;
  h.crs_code = crs_code;
  h.bands = bands;
  h.dtype = dtype;
  h.nodata = nodata;
  h.validate();
  return h;
}

void require_same_geometry(const RasterHeader& a, const RasterHeader& b, const char* what) {
  if (a.same_geometry(b)) return;
  std::ostringstream msg;
  msg << what << ": raster geometry mismatch (" << a.width << "x" << a.height << " gsd " << a.gsd
      << " vs " << b.width << "x" << b.height << " gsd " << b.gsd << ")";
  throw DomainError(msg.str());
}

}  // namespace lidar_anchor
