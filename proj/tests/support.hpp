#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>

#include "lidar_anchor/raster.hpp"

namespace test_support {

using namespace lidar_anchor;

inline HeightRaster random_height(int w, int h, std::uint64_t seed, double lo = 0.0, double hi = 30.0,
                                  double gsd = 1.0) {
  HeightRaster r = make_raster<float>(make_header(w, h, gsd, 1000.0, 2000.0, 32633, 1, DType::float32));
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  for (float& v : r.values) v = static_cast<float>(dist(gen));
  return r;
}

inline HeightRaster constant_height(int w, int h, float value, double gsd = 1.0) {
  return make_raster<float>(make_header(w, h, gsd, 1000.0, 2000.0, 32633, 1, DType::float32), value);
}

inline LandCoverRaster constant_landcover(int w, int h, std::uint8_t code, double gsd = 1.0) {
  return make_raster<std::uint8_t>(make_header(w, h, gsd, 1000.0, 2000.0, 32633, 1, DType::uint8), code);
}

inline OpticalRaster constant_optical(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b,
                                      double gsd = 1.0) {
  OpticalRaster o = make_raster<std::uint8_t>(make_header(w, h, gsd, 1000.0, 2000.0, 32633, 3, DType::uint8));
  for (std::size_t i = 0; i < o.header.pixel_count(); ++i) {
    o.values[i * 3] = r;
    o.values[i * 3 + 1] = g;
    o.values[i * 3 + 2] = b;
  }
  return o;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("lidar_anchor_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

}  // namespace test_support
