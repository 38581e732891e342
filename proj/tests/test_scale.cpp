#include <gtest/gtest.h>

#include <random>

#include "lidar_anchor/scale_calibration.hpp"
#include "support.hpp"

using namespace lidar_anchor;
using namespace test_support;

namespace {

std::vector<CleanPhoton> photons_on(const HeightRaster& depth, double a, double b, int n, std::uint64_t seed,
                                    double noise = 0.0) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<CleanPhoton> out;
  for (int i = 0; i < n; ++i) {
    const int col = static_cast<int>(gen() % static_cast<std::uint64_t>(depth.width()));
    const int row = static_cast<int>(gen() % static_cast<std::uint64_t>(depth.height()));
    const Point p = depth.header.pixel_center(col, row);
    CleanPhoton c;
    c.x = p.x;
    c.y = p.y;
    c.h_ag = a * depth.at(col, row) + b + (noise > 0 ? noise * nd(gen) : 0.0);
    c.kind = PhotonKind::object;
    out.push_back(c);
  }
  return out;
}

}  // namespace

TEST(FitAffine, RecoversExactLine) {
  const HeightRaster d = random_height(32, 32, 1, 0.0, 1.0);
  const auto fit = fit_affine(d, photons_on(d, 2.0, 1.0, 200, 2));
  EXPECT_NEAR(fit.a, 2.0, 1e-9);
  EXPECT_NEAR(fit.b, 1.0, 1e-9);
  EXPECT_LT(fit.rmse, 1e-9);
  EXPECT_EQ(fit.n_points, 200);
}

TEST(FitAffine, NegativeSlopeIsAllowed) {
  const HeightRaster d = random_height(32, 32, 3, 0.0, 1.0);
  const auto fit = fit_affine(d, photons_on(d, -40.0, 30.0, 150, 4));
  EXPECT_NEAR(fit.a, -40.0, 1e-9);
  EXPECT_NEAR(fit.b, 30.0, 1e-9);
}

TEST(FitAffine, DegenerateInputs) {
  const HeightRaster flat = constant_height(16, 16, 0.5f);
  EXPECT_THROW(fit_affine(flat, photons_on(flat, 2, 1, 50, 5)), DomainError);
  const HeightRaster d = random_height(16, 16, 6, 0.0, 1.0);
  EXPECT_THROW(fit_affine(d, photons_on(d, 2, 1, kMinAffinePoints - 1, 7)), DomainError);
}

TEST(FitAffine, OrderDoesNotMatter) {
  const HeightRaster d = random_height(32, 32, 8, 0.0, 1.0);
  auto ps = photons_on(d, 3.0, -2.0, 300, 9, 0.5);
  const auto f1 = fit_affine(d, ps);
  std::reverse(ps.begin(), ps.end());
  const auto f2 = fit_affine(d, ps);
  EXPECT_EQ(f1.a, f2.a);
  EXPECT_EQ(f1.b, f2.b);
}

TEST(FitAffine, RobustResistsOutliers) {
  const HeightRaster d = random_height(32, 32, 10, 0.0, 1.0);
  auto ps = photons_on(d, 20.0, 5.0, 300, 11, 0.1);
  for (int i = 0; i < 20; ++i) ps[static_cast<std::size_t>(i)].h_ag += 60.0;
  AffineFitOptions robust;
  robust.robust = true;
  const auto ols = fit_affine(d, ps);
  const auto huber = fit_affine(d, ps, robust);
  EXPECT_LT(std::abs(huber.b - 5.0), std::abs(ols.b - 5.0));
  EXPECT_NEAR(huber.a, 20.0, 0.5);
}

TEST(ApplyAffine, PointwiseArithmetic) {
  const HeightRaster c = constant_height(4, 4, 0.5f);
  for (float v : apply_affine(c, {2.0, 1.0, 0, 0}).values) EXPECT_EQ(v, 2.0f);

  HeightRaster r = random_height(32, 32, 12);
  r.header.nodata = -9999.0;
  r.values[5] = -9999.0f;
  const auto id = apply_affine(r, {1.0, 0.0, 0, 0});
  EXPECT_EQ(id.values, r.values);

  const AffineFit f{-1.7, 3.25, 0, 0};
  const auto out = apply_affine(r, f);
  for (std::size_t i = 0; i < r.values.size(); ++i) {
    if (i == 5) {
      EXPECT_EQ(out.values[i], -9999.0f);
      continue;
    }
    EXPECT_EQ(out.values[i], static_cast<float>(f.a * static_cast<double>(r.values[i]) + f.b));
  }
}
