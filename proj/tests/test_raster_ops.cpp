#include <gtest/gtest.h>

#include <random>

#include "lidar_anchor/raster_ops.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace lidar_anchor;
using namespace test_support;

TEST(Bilinear, ConstantField) {
  const HeightRaster r = constant_height(6, 5, 7.0f);
  EXPECT_DOUBLE_EQ(*sample_bilinear(r, 1002.3, 1997.1), 7.0);
}

TEST(Bilinear, HorizontalMidpointOfCenters) {
  HeightRaster r = constant_height(2, 2, 0.0f);
  r.at(1, 0) = 10.0f;
  r.at(1, 1) = 10.0f;
  // Centers at x = 1000.5 and 1001.5.
  EXPECT_DOUBLE_EQ(*sample_bilinear(r, 1001.0, 1999.0), 5.0);
}

TEST(Bilinear, PixelCenterIsIdentity) {
  const HeightRaster r = random_height(9, 7, 3);
  for (int row = 0; row < 7; ++row) {
    for (int col = 0; col < 9; ++col) {
      const Point p = r.header.pixel_center(col, row);
      EXPECT_DOUBLE_EQ(*sample_bilinear(r, p.x, p.y), r.at(col, row));
    }
  }
}

TEST(Bilinear, NodataNeighborsAreRenormalized) {
  HeightRaster r = constant_height(2, 2, 4.0f);
  r.header.nodata = -1.0;
  r.at(0, 0) = -1.0f;
  EXPECT_DOUBLE_EQ(*sample_bilinear(r, 1001.0, 1999.0), 4.0);
  for (float& v : r.values) v = -1.0f;
  EXPECT_FALSE(sample_bilinear(r, 1001.0, 1999.0));
}

TEST(Bilinear, OutsideExtentThrows) {
  const HeightRaster r = constant_height(4, 4, 1.0f);
  EXPECT_THROW(sample_bilinear(r, 999.0, 1999.0), DomainError);
  EXPECT_THROW(sample_bilinear(r, 1001.0, 2000.5), DomainError);
}

TEST(Window, SingleSizeIsIdentity) {
  const HeightRaster r = random_height(10, 10, 1);
  const Patch<float> p = extract_window(r, 5, 5, 1);
  ASSERT_EQ(p.values.size(), 1u);
  EXPECT_EQ(p.values[0], r.at(5, 5));
}

TEST(Window, CornerMatchesPaddedReference) {
  const HeightRaster r = random_height(128, 128, 2);
  const Patch<float> p = extract_window(r, 0, 0, 64);
  ASSERT_EQ(p.values.size(), 64u * 64u);
  // Explicitly padded copy: 32 replicated rows/cols on the top and left.
  const int pad = 32;
  std::vector<float> padded(static_cast<std::size_t>((128 + pad) * (128 + pad)));
  for (int row = 0; row < 128 + pad; ++row) {
    for (int col = 0; col < 128 + pad; ++col) {
      padded[static_cast<std::size_t>(row * (128 + pad) + col)] =
          r.at(std::max(0, col - pad), std::max(0, row - pad));
    }
  }
  for (int row = 0; row < 64; ++row) {
    for (int col = 0; col < 64; ++col) {
      ASSERT_EQ(p.at(col, row), padded[static_cast<std::size_t>(row * (128 + pad) + col)]);
    }
  }
}

TEST(Window, InteriorEqualsRawSlice) {
  const HeightRaster r = random_height(128, 128, 3);
  const Patch<float> p = extract_window(r, 64, 64, 64);
  for (int row = 0; row < 64; ++row) {
    for (int col = 0; col < 64; ++col) ASSERT_EQ(p.at(col, row), r.at(32 + col, 32 + row));
  }
}

TEST(Window, OpticalKeepsBands) {
  OpticalRaster o = constant_optical(5, 5, 1, 2, 3);
  o.at(4, 4, 2) = 77;
  const Patch<std::uint8_t> p = extract_window(o, 4, 4, 3);
  EXPECT_EQ(p.bands, 3);
  EXPECT_EQ(p.values.size(), 27u);
  EXPECT_EQ(p.at(1, 1, 2), 77);
  EXPECT_EQ(p.at(2, 2, 2), 77);  // replicated beyond the edge
  EXPECT_EQ(p.at(0, 0, 0), 1);
}

namespace {

Patch<double> make_patch(int size, auto fn) {
  Patch<double> p;
  p.size = size;
  p.values.resize(static_cast<std::size_t>(size * size));
  for (int r = 0; r < size; ++r) {
    for (int c = 0; c < size; ++c) p.at(c, r) = fn(c, r);
  }
  return p;
}

}  // namespace

TEST(Sobel, ConstantIsZero) {
  const Patch<double> g = sobel_magnitude(make_patch(8, [](int, int) { return 3.5; }));
  for (double v : g.values) EXPECT_EQ(v, 0.0);
}

TEST(Sobel, UnitRampGivesEight) {
  const Patch<double> g = sobel_magnitude(make_patch(8, [](int c, int) { return static_cast<double>(c); }));
  for (int r = 1; r < 7; ++r) {
    for (int c = 1; c < 7; ++c) EXPECT_DOUBLE_EQ(g.at(c, r), 8.0);
  }
  // Replicated border halves the central difference.
  EXPECT_DOUBLE_EQ(g.at(0, 3), 4.0);
}

TEST(Sobel, MatchesDirectConvolution) {
  std::mt19937 gen(5);
  std::uniform_real_distribution<double> d(-10, 10);
  const Patch<double> p = make_patch(13, [&](int, int) { return d(gen); });
  const Patch<double> g = sobel_magnitude(p);
  const auto at = [&](int c, int r) { return p.at(std::clamp(c, 0, 12), std::clamp(r, 0, 12)); };
  for (int r = 0; r < 13; ++r) {
    for (int c = 0; c < 13; ++c) {
      const double gx = (at(c + 1, r - 1) + 2 * at(c + 1, r) + at(c + 1, r + 1)) -
                        (at(c - 1, r - 1) + 2 * at(c - 1, r) + at(c - 1, r + 1));
      const double gy = (at(c - 1, r + 1) + 2 * at(c, r + 1) + at(c + 1, r + 1)) -
                        (at(c - 1, r - 1) + 2 * at(c, r - 1) + at(c + 1, r - 1));
      EXPECT_NEAR(g.at(c, r), std::sqrt(gx * gx + gy * gy), 1e-12);
    }
  }
}

TEST(Sobel, TransposeCommutes) {
  std::mt19937 gen(6);
  std::uniform_real_distribution<double> d(0, 5);
  const Patch<double> p = make_patch(9, [&](int, int) { return d(gen); });
  const Patch<double> t = make_patch(9, [&](int c, int r) { return p.at(r, c); });
  const Patch<double> gp = sobel_magnitude(p);
  const Patch<double> gt = sobel_magnitude(t);
  for (int r = 0; r < 9; ++r) {
    for (int c = 0; c < 9; ++c) EXPECT_NEAR(gt.at(c, r), gp.at(r, c), 1e-12);
  }
}

TEST(Sobel, TooSmallThrows) { EXPECT_THROW(sobel_magnitude(make_patch(2, [](int, int) { return 0.0; })), DomainError); }

TEST(Footprint, ConstantRaster) {
  const HeightRaster r = constant_height(40, 40, 4.2f, 0.5);
  EXPECT_NEAR(*footprint_mean(r, 1010.0, 1990.0, 17.0), 4.2, 1e-6);
}

TEST(Footprint, SubPixelDiskReadsContainingPixel) {
  const HeightRaster r = random_height(10, 10, 8);
  // Off-center point whose 0.4 m disk contains no pixel center.
  EXPECT_EQ(*footprint_mean(r, 1003.2, 1994.1, 0.4), r.at(3, 5));
}

TEST(Footprint, CheckerboardAveragesToHalf) {
  HeightRaster r = constant_height(128, 128, 0.0f, 0.5);
  for (int row = 0; row < 128; ++row) {
    for (int col = 0; col < 128; ++col) r.at(col, row) = (row + col) % 2 ? 10.0f : 0.0f;
  }
  const double v = *footprint_mean(r, 1032.1, 1967.7, 17.0);
  EXPECT_NEAR(v, 5.0, 0.2);
  EXPECT_EQ(v, *oracle::footprint_mean(r, 1032.1, 1967.7, 17.0));
}

TEST(Footprint, EqualsEnumerationOracle) {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int w = 8 + static_cast<int>(gen() % 120);
    const int h = 8 + static_cast<int>(gen() % 120);
    HeightRaster r = random_height(w, h, gen(), 0.0, 40.0, 0.5);
    r.header.nodata = -1.0;
    for (int k = 0; k < w * h / 10; ++k) r.values[gen() % r.values.size()] = -1.0f;
    std::uniform_real_distribution<double> ux(r.header.min_x() - 3.0, r.header.max_x() + 3.0);
    std::uniform_real_distribution<double> uy(r.header.min_y() - 3.0, r.header.max_y() + 3.0);
    std::uniform_real_distribution<double> ud(0.1, 20.0);
    const double x = ux(gen), y = uy(gen), d = ud(gen);
    if (!r.header.contains(x, y)) continue;
    const auto got = footprint_mean(r, x, y, d);
    const auto want = oracle::footprint_mean(r, x, y, d);
    ASSERT_EQ(got.has_value(), want.has_value());
    if (got) {
      ASSERT_EQ(*got, *want);
    }
  }
}

TEST(Footprint, DiskOutsideRasterThrows) {
  const HeightRaster r = constant_height(10, 10, 1.0f);
  EXPECT_THROW(footprint_mean(r, 900.0, 1995.0, 17.0), DomainError);
}

TEST(Footprint, AllNodataYieldsNothing) {
  HeightRaster r = constant_height(10, 10, 1.0f);
  r.header.nodata = 1.0;
  EXPECT_FALSE(footprint_mean(r, 1005.0, 1995.0, 4.0));
}

TEST(Percentile, InterpolatesBetweenOrderStatistics) {
  EXPECT_DOUBLE_EQ(percentile({1, 2, 3, 4}, 50.0), 2.5);
  EXPECT_DOUBLE_EQ(percentile({5}, 90.0), 5.0);
  EXPECT_DOUBLE_EQ(percentile({0, 10}, 90.0), 9.0);
  EXPECT_DOUBLE_EQ(percentile({3, 1, 2}, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(percentile({3, 1, 2}, 100.0), 3.0);
  EXPECT_THROW(percentile({}, 50.0), DomainError);
  EXPECT_THROW(percentile({1.0}, 101.0), DomainError);
}

TEST(Percentile, EqualsEnumerationOracle) {
  std::mt19937_64 gen(12);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> v(1 + gen() % 60);
    for (double& x : v) x = static_cast<double>(gen() % 50) * 0.25;
    const double p = static_cast<double>(gen() % 1001) / 10.0;
    ASSERT_EQ(percentile(v, p), oracle::percentile(v, p));
  }
}
