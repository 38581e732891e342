#include <gtest/gtest.h>

#include "lidar_anchor/residual.hpp"
#include "support.hpp"

using namespace lidar_anchor;
using namespace test_support;

namespace {

struct Stack {
  HeightRaster pred;
  OpticalRaster optical;
  LandCoverRaster lc;
};

Stack constant_stack(int size, float h) {
  return {constant_height(size, size, h), constant_optical(size, size, 90, 120, 60),
          constant_landcover(size, size, static_cast<std::uint8_t>(LandCover::developed))};
}

CleanPhoton clean_at(const RasterHeader& h, int col, int row, double h_ag) {
  const Point p = h.pixel_center(col, row);
  return {p.x, p.y, h_ag, h_ag > 0 ? PhotonKind::object : PhotonKind::ground, 2, 1};
}

RandomForest constant_forest(double v) {
  RandomForest f;
  f.schema = FeatureSchema::hrf27;
  f.n_features = kHrfFeatureCount;
  RegressionTree t;
  t.nodes.push_back({-1, 0.0, -1, -1, v, 1, 0.0});
  f.trees.push_back(t);
  return f;
}

/// Residual = pred_mean of the window.
RandomForest mean_forest(const std::vector<double>& cuts) {
  RandomForest f = constant_forest(0.0);
  auto& nodes = f.trees[0].nodes;
  nodes.clear();
  // Chain of splits on feature 0 with leaves worth the lower cut.
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    const int self = static_cast<int>(nodes.size());
    nodes.push_back({0, cuts[i], self + 1, self + 2, 0.0, 1, 0.0});
    nodes.push_back({-1, 0.0, -1, -1, cuts[i], 1, 0.0});
  }
  nodes.push_back({-1, 0.0, -1, -1, 1000.0, 1, 0.0});
  return f;
}

}  // namespace

TEST(TrainingSet, TargetIsPredMinusPhoton) {
  const Stack s = constant_stack(32, 10.0f);
  const auto ctx = FeatureContext::hrf(s.pred, s.optical, s.lc, 8);
  const std::vector<CleanPhoton> ps{clean_at(s.pred.header, 5, 5, 4.0)};
  const auto set = build_training_set(ctx, ps);
  ASSERT_EQ(set.samples.size(), 1u);
  EXPECT_EQ(set.samples.y[0], 6.0);
  EXPECT_EQ(set.samples.n_features, 27);
  EXPECT_EQ(set.samples.row(0)[0], 10.0);
}

TEST(TrainingSet, PerfectPredictionGivesZeroTargets) {
  const HeightRaster pred = random_height(40, 40, 5);
  const OpticalRaster opt = constant_optical(40, 40, 1, 2, 3);
  const LandCoverRaster lc = constant_landcover(40, 40, 0);
  const auto ctx = FeatureContext::hrf(pred, opt, lc, 8);
  std::vector<CleanPhoton> ps;
  for (int i = 0; i < 40; ++i) ps.push_back(clean_at(pred.header, i, (i * 7) % 40, pred.at(i, (i * 7) % 40)));
  const auto set = build_training_set(ctx, ps);
  ASSERT_EQ(set.samples.size(), 40u);
  for (double y : set.samples.y) EXPECT_EQ(y, 0.0);
}

TEST(TrainingSet, NodataAndOutsidePhotonsAreCounted) {
  Stack s = constant_stack(32, 10.0f);
  s.pred.header.nodata = -9999.0;
  s.pred.at(3, 3) = -9999.0f;
  const auto ctx = FeatureContext::hrf(s.pred, s.optical, s.lc, 8);
  std::vector<CleanPhoton> ps{clean_at(s.pred.header, 3, 3, 1.0), clean_at(s.pred.header, 4, 4, 1.0)};
  ps.push_back({5000.0, 2000.0, 1.0, PhotonKind::object, 7, 1});
  const auto set = build_training_set(ctx, ps);
  EXPECT_EQ(set.samples.size(), 1u);
  EXPECT_EQ(set.skipped_nodata, 1u);
  EXPECT_EQ(set.skipped_outside, 1u);
  EXPECT_THROW(build_training_set(ctx, std::vector<CleanPhoton>{ps[0]}), DomainError);
}

TEST(TrainingSet, FootprintAveragesPrediction) {
  HeightRaster pred = constant_height(40, 40, 0.0f, 0.5);
  for (int r = 0; r < 40; ++r) {
    for (int c = 0; c < 40; ++c) pred.at(c, r) = (r + c) % 2 ? 10.0f : 0.0f;
  }
  const OpticalRaster opt = constant_optical(40, 40, 1, 1, 1, 0.5);
  const LandCoverRaster lc = constant_landcover(40, 40, 0, 0.5);
  const auto ctx = FeatureContext::hrf(pred, opt, lc, 8);
  const std::vector<CleanPhoton> ps{clean_at(pred.header, 20, 20, 0.0)};
  const auto point = build_training_set(ctx, ps);
  const auto disk = build_training_set(ctx, ps, 8.0);
  EXPECT_EQ(point.samples.y[0], 0.0);
  EXPECT_NEAR(disk.samples.y[0], 5.0, 0.3);
}

TEST(WindowOrigins, CoverTheExtent) {
  EXPECT_EQ(window_origins(128, 64, 64), (std::vector<int>{0, 64}));
  EXPECT_EQ(window_origins(128, 64, 32), (std::vector<int>{0, 32, 64}));
  EXPECT_EQ(window_origins(100, 64, 32), (std::vector<int>{0, 32, 36}));
  EXPECT_EQ(window_origins(40, 64, 32), (std::vector<int>{0}));
}

TEST(ResidualField, ConstantForestGivesConstantField) {
  const Stack s = constant_stack(100, 5.0f);
  const auto ctx = FeatureContext::hrf(s.pred, s.optical, s.lc, 32);
  const auto field = infer_residual_field(ctx, constant_forest(3.0), 16);
  for (double v : field.values) ASSERT_EQ(v, 3.0);
  for (auto c : field.coverage) ASSERT_GE(c, 1u);
}

TEST(ResidualField, DisjointTilingCoversOnce) {
  const Stack s = constant_stack(128, 5.0f);
  const auto ctx = FeatureContext::hrf(s.pred, s.optical, s.lc, 64);
  const auto field = infer_residual_field(ctx, constant_forest(1.0), 64);
  for (auto c : field.coverage) ASSERT_EQ(c, 1u);
}

TEST(ResidualField, InteriorPixelAveragesCoveringWindows) {
  const HeightRaster pred = random_height(128, 128, 31, 0.0, 30.0);
  const OpticalRaster opt = constant_optical(128, 128, 5, 5, 5);
  const LandCoverRaster lc = constant_landcover(128, 128, 1);
  const auto ctx = FeatureContext::hrf(pred, opt, lc, 64);
  std::vector<double> cuts;
  for (int i = 1; i < 300; ++i) cuts.push_back(14.0 + 0.01 * i);
  const RandomForest model = mean_forest(cuts);
  const auto field = infer_residual_field(ctx, model, 32);
  const int col = 50, row = 40;
  EXPECT_EQ(field.coverage[static_cast<std::size_t>(row * 128 + col)], 4u);
  double sum = 0.0;
  for (int y0 : {0, 32}) {
    for (int x0 : {32, 0}) sum += model.predict(ctx.at_pixel(x0 + 32, y0 + 32));
  }
  EXPECT_NEAR(field.values[static_cast<std::size_t>(row * 128 + col)], sum / 4.0, 1e-12);
}

TEST(ResidualField, SchemaMismatchIsRejected) {
  const Stack s = constant_stack(64, 5.0f);
  const auto ctx = FeatureContext::hrf(s.pred, s.optical, s.lc, 16);
  RandomForest f = constant_forest(1.0);
  f.schema = FeatureSchema::nrf;
  f.n_features = 8;
  EXPECT_THROW(infer_residual_field(ctx, f, 8), SchemaError);
}

TEST(ApplyCorrection, SubtractsAndClamps) {
  HeightRaster pred = constant_height(3, 1, 10.0f);
  pred.at(1, 0) = 2.0f;
  pred.header.nodata = -1.0;
  pred.at(2, 0) = -1.0f;
  ResidualField field{pred.header, {3.0, 5.0, 1.0}, {1, 1, 1}};
  const auto out = apply_correction(pred, field);
  EXPECT_EQ(out.values, (std::vector<float>{7.0f, 0.0f, -1.0f}));

  const HeightRaster r = random_height(16, 16, 2);
  ResidualField zero{r.header, std::vector<double>(256, 0.0), std::vector<std::uint32_t>(256, 1)};
  EXPECT_EQ(apply_correction(r, zero).values, r.values);
}

TEST(FeatureContext, EmbeddingsMustCoverPrediction) {
  const HeightRaster pred = constant_height(28, 28, 1.0f);
  EmbeddingGrid g;
  g.grid = make_raster<float>(make_header(2, 2, 14.0, 1000, 2000, 32633, 4, DType::float32), 0.5f);
  const auto ctx = FeatureContext::nrf(pred, g, 8);
  EXPECT_EQ(ctx.at_pixel(27, 27).values.size(), 4u);
  g.grid = make_raster<float>(make_header(1, 2, 14.0, 1000, 2000, 32633, 4, DType::float32), 0.5f);
  EXPECT_THROW(FeatureContext::nrf(pred, g, 8), DomainError);
}
