#include <gtest/gtest.h>

#include <cstring>

#include "lidar_anchor/error.hpp"
#include "lidar_anchor/raster_io.hpp"
#include "support.hpp"

using namespace lidar_anchor;
using namespace test_support;

TEST(RasterHeader, PixelCenterRoundTrip) {
  const RasterHeader h = make_header(37, 19, 0.5, 500000.0, 4100000.0, 32633, 1, DType::float32);
  for (int r = 0; r < h.height; ++r) {
    for (int c = 0; c < h.width; ++c) {
      const Point p = h.pixel_center(c, r);
      const auto px = h.containing_pixel(p.x, p.y);
      ASSERT_TRUE(px);
      EXPECT_EQ(px->first, c);
      EXPECT_EQ(px->second, r);
      const Point f = h.to_pixel(p.x, p.y);
      EXPECT_DOUBLE_EQ(f.x, c + 0.5);
      EXPECT_DOUBLE_EQ(f.y, r + 0.5);
    }
  }
  EXPECT_EQ(h.pixel_center(0, 0).x, 500000.25);
  EXPECT_EQ(h.pixel_center(0, 0).y, 4099999.75);
}

TEST(RasterIo, DecodesTwoByTwo) {
  const auto dir = temp_dir("decode");
  const float payload[] = {1.0f, 2.0f, 3.0f, 4.0f};
  std::string bytes(sizeof payload, '\0');
  std::memcpy(bytes.data(), payload, sizeof payload);
  write_file(dir / "r.bin", bytes);
  write_file(dir / "r.json",
             R"({"width":2,"height":2,"bands":1,"dtype":"float32","gsd":1.0,"origin_x":0,"origin_y":2,"crs_code":32633,"nodata":null})");
  const HeightRaster r = load_height(dir / "r");
  EXPECT_EQ(r.at(1, 1), 4.0f);
  EXPECT_EQ(r.at(1, 0), 2.0f);
  EXPECT_FALSE(r.header.nodata);
}

TEST(RasterIo, RejectsSizeMismatch) {
  const auto dir = temp_dir("mismatch");
  write_file(dir / "r.bin", std::string(8 * sizeof(float), '\0'));
  write_file(dir / "r.json",
             R"({"width":3,"height":3,"bands":1,"dtype":"float32","gsd":1.0,"origin_x":0,"origin_y":3,"crs_code":1,"nodata":null})");
  EXPECT_THROW(load_height(dir / "r.bin"), FormatError);
}

TEST(RasterIo, MissingFilesAndBadHeaders) {
  const auto dir = temp_dir("missing");
  EXPECT_THROW(load_height(dir / "nothing"), IoError);
  write_file(dir / "r.bin", std::string(4, '\0'));
  write_file(dir / "r.json", R"({"width":1,"height":1,"bands":1,"dtype":"int16","gsd":1.0,"origin_x":0,"origin_y":1,"crs_code":1})");
  EXPECT_THROW(load_raster(dir / "r"), FormatError);
  write_file(dir / "r.json", "{not json");
  EXPECT_THROW(load_raster(dir / "r"), FormatError);
}

TEST(RasterIo, RandomRoundTripIsBitExact) {
  const auto dir = temp_dir("roundtrip");
  HeightRaster r = random_height(64, 64, 7, -50.0, 50.0, 0.5);
  r.header.nodata = -9999.0;
  r.values[5] = -9999.0f;
  save_raster(r, dir / "h.bin");
  const HeightRaster back = load_height(dir / "h");
  EXPECT_TRUE(back.header.same_geometry(r.header));
  EXPECT_EQ(back.header.nodata, r.header.nodata);
  ASSERT_EQ(back.values.size(), r.values.size());
  EXPECT_EQ(std::memcmp(back.values.data(), r.values.data(), r.values.size() * sizeof(float)), 0);
  EXPECT_TRUE(back.is_nodata(back.values[5]));

  // Saving the loaded raster again reproduces both files byte for byte.
  save_raster(back, dir / "h2.bin");
  EXPECT_EQ(read_file(dir / "h.bin"), read_file(dir / "h2.bin"));
  EXPECT_EQ(read_file(dir / "h.json"), read_file(dir / "h2.json"));
}

TEST(RasterIo, OpticalIsPixelInterleaved) {
  const auto dir = temp_dir("optical");
  OpticalRaster o = constant_optical(3, 2, 10, 20, 30);
  o.at(2, 1, 1) = 99;
  save_raster(o, dir / "o.bin");
  const std::string bytes = read_file(dir / "o.bin");
  ASSERT_EQ(bytes.size(), 18u);
  EXPECT_EQ(static_cast<unsigned char>(bytes[(1 * 3 + 2) * 3 + 1]), 99);
  const OpticalRaster back = load_optical(dir / "o");
  EXPECT_EQ(back.at(2, 1, 1), 99);
  EXPECT_EQ(back.at(0, 0, 2), 30);
}

TEST(RasterIo, LandCoverCodesAreValidated) {
  const auto dir = temp_dir("lc");
  LandCoverRaster lc = constant_landcover(4, 4, 4);
  lc.values[3] = 9;
  save_raster(lc, dir / "lc.bin");
  EXPECT_THROW(load_landcover(dir / "lc"), FormatError);
  lc.header.nodata = 9.0;
  save_raster(lc, dir / "lc.bin");
  EXPECT_NO_THROW(load_landcover(dir / "lc"));
}

TEST(RasterIo, EmbeddingGridKeepsCellSize) {
  const auto dir = temp_dir("emb");
  EmbeddingGrid g;
  g.cell_px = 14;
  g.grid = make_raster<float>(make_header(3, 2, 14.0, 0.0, 28.0, 1, 4, DType::float32));
  for (std::size_t i = 0; i < g.grid.values.size(); ++i) g.grid.values[i] = static_cast<float>(i);
  save_embeddings(g, dir / "emb");
  const EmbeddingGrid back = load_embeddings(dir / "emb");
  EXPECT_EQ(back.cell_px, 14);
  EXPECT_EQ(back.dim(), 4);
  EXPECT_EQ(back.grid.values, g.grid.values);
  EXPECT_TRUE(back.covers(42, 28));
  EXPECT_FALSE(back.covers(43, 28));
}

TEST(Raster, GeometryMismatchIsReported) {
  const HeightRaster a = constant_height(8, 8, 1.0f);
  const HeightRaster b = constant_height(8, 9, 1.0f);
  EXPECT_THROW(require_same_geometry(a.header, b.header, "test"), DomainError);
  EXPECT_NO_THROW(require_same_geometry(a.header, a.header, "test"));
}
