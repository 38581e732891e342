#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lidar_anchor/features.hpp"
#include "support.hpp"

using namespace lidar_anchor;
using namespace test_support;

namespace {

Patch<double> pred_patch(int size, double v) { return {size, 1, std::vector<double>(static_cast<std::size_t>(size * size), v)}; }

Patch<std::uint8_t> optical_patch(int size, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  Patch<std::uint8_t> p{size, 3, {}};
  for (int i = 0; i < size * size; ++i) {
    p.values.push_back(r);
    p.values.push_back(g);
    p.values.push_back(b);
  }
  return p;
}

Patch<std::uint8_t> lc_patch(int size, std::uint8_t code) {
  return {size, 1, std::vector<std::uint8_t>(static_cast<std::size_t>(size * size), code)};
}

}  // namespace

TEST(HrfSchema, FrozenOrder) {
  const auto& names = hrf_feature_names();
  ASSERT_EQ(names.size(), 27u);
  const std::vector<std::string> expected{
      "pred_mean", "pred_std",  "pred_min",  "pred_max",      "pred_p90",      "pred_p10",    "grad_mean",
      "grad_std",  "grad_p95",  "r_mean",    "r_std",         "g_mean",        "g_std",       "b_mean",
      "b_std",     "gr_index_mean", "gr_index_std", "rg_ratio", "lc_bareland", "lc_rangeland", "lc_developed",
      "lc_road",   "lc_tree",   "lc_water",  "lc_agriculture", "lc_building",  "lc_entropy"};
  EXPECT_EQ(names, expected);
  EXPECT_STREQ(hrf_feature_group(0), "prediction_stats");
  EXPECT_STREQ(hrf_feature_group(8), "gradient");
  EXPECT_STREQ(hrf_feature_group(17), "optical");
  EXPECT_STREQ(hrf_feature_group(26), "land_cover");
  EXPECT_EQ(feature_names(FeatureSchema::nrf, 3), (std::vector<std::string>{"emb_0", "emb_1", "emb_2"}));
  EXPECT_EQ(schema_from_string("hrf27"), FeatureSchema::hrf27);
  EXPECT_EQ(schema_from_string("nrf"), FeatureSchema::nrf);
  EXPECT_THROW(schema_from_string("v2"), SchemaError);
}

TEST(HrfFeatures, ConstantInputs) {
  const auto fv = hrf_features(pred_patch(16, 5.0), optical_patch(16, 128, 128, 128),
                               lc_patch(16, static_cast<std::uint8_t>(LandCover::building)));
  ASSERT_EQ(fv.values.size(), 27u);
  const std::vector<double> pred_block(fv.values.begin(), fv.values.begin() + 6);
  EXPECT_EQ(pred_block, (std::vector<double>{5, 0, 5, 5, 5, 5}));
  for (int i = 6; i < 9; ++i) EXPECT_EQ(fv.values[static_cast<std::size_t>(i)], 0.0);
  const double gray = 128.0 / 255.0;
  EXPECT_NEAR(fv.values[9], gray, 1e-12);
  EXPECT_NEAR(fv.values[10], 0.0, 1e-12);
  EXPECT_NEAR(fv.values[15], 0.0, 1e-12);
  EXPECT_NEAR(fv.values[17], gray / (gray + 1e-6), 1e-12);
  for (int c = 0; c < 8; ++c) EXPECT_EQ(fv.values[static_cast<std::size_t>(18 + c)], c == 7 ? 1.0 : 0.0);
  EXPECT_EQ(fv.values[26], 0.0);
}

TEST(HrfFeatures, EntropyOfMixtures) {
  auto lc = lc_patch(8, 4);
  for (int i = 0; i < 32; ++i) lc.values[static_cast<std::size_t>(i)] = 7;
  auto fv = hrf_features(pred_patch(8, 1.0), optical_patch(8, 10, 20, 30), lc);
  EXPECT_DOUBLE_EQ(fv.values[22], 0.5);
  EXPECT_DOUBLE_EQ(fv.values[25], 0.5);
  EXPECT_NEAR(fv.values[26], std::log(2.0), 1e-12);

  for (int i = 0; i < 64; ++i) lc.values[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(i % 8);
  fv = hrf_features(pred_patch(8, 1.0), optical_patch(8, 10, 20, 30), lc);
  EXPECT_NEAR(fv.values[26], std::log(8.0), 1e-12);
}

TEST(HrfFeatures, InvariantsOnRandomPatches) {
  std::mt19937_64 gen(17);
  std::lognormal_distribution<double> h(1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int size = 3 + static_cast<int>(gen() % 30);
    Patch<double> pred = pred_patch(size, 0.0);
    for (double& v : pred.values) v = gen() % 10 == 0 ? std::nan("") : h(gen);
    pred.values[0] = 1.0;
    Patch<std::uint8_t> opt = optical_patch(size, 0, 0, 0);
    for (auto& v : opt.values) v = static_cast<std::uint8_t>(gen() % 256);
    Patch<std::uint8_t> lc = lc_patch(size, 0);
    for (auto& v : lc.values) v = static_cast<std::uint8_t>(gen() % 8);
    const auto f = hrf_features(pred, opt, lc).values;
    for (double v : f) ASSERT_TRUE(std::isfinite(v));
    EXPECT_LE(f[2], f[5]);
    EXPECT_LE(f[5], f[4]);
    EXPECT_LE(f[4], f[3]);
    EXPECT_LE(f[2], f[0]);
    EXPECT_LE(f[0], f[3]);
    EXPECT_GE(f[1], 0.0);
    EXPECT_GE(f[6], 0.0);
    double frac = 0.0;
    for (int c = 18; c < 26; ++c) {
      EXPECT_GE(f[static_cast<std::size_t>(c)], 0.0);
      frac += f[static_cast<std::size_t>(c)];
    }
    EXPECT_NEAR(frac, 1.0, 1e-12);
    EXPECT_GE(f[26], 0.0);
    EXPECT_LE(f[26], std::log(8.0) + 1e-12);
    for (int c = 9; c < 15; c += 2) {
      EXPECT_GE(f[static_cast<std::size_t>(c)], 0.0);
      EXPECT_LE(f[static_cast<std::size_t>(c)], 1.0);
    }
  }
}

TEST(HrfFeatures, RejectsBadWindows) {
  EXPECT_THROW(hrf_features(pred_patch(8, 1), optical_patch(7, 0, 0, 0), lc_patch(8, 0)), DomainError);
  EXPECT_THROW(hrf_features(pred_patch(2, 1), optical_patch(2, 0, 0, 0), lc_patch(2, 0)), DomainError);
  EXPECT_THROW(hrf_features(pred_patch(8, std::nan("")), optical_patch(8, 0, 0, 0), lc_patch(8, 0)), DomainError);
  Patch<std::uint8_t> gray{8, 1, std::vector<std::uint8_t>(64, 0)};
  EXPECT_THROW(hrf_features(pred_patch(8, 1), gray, lc_patch(8, 0)), DomainError);
}

TEST(NrfFeatures, CellLookup) {
  EmbeddingGrid g;
  g.cell_px = 14;
  g.grid = make_raster<float>(make_header(2, 2, 7.0, 0, 0, 32633, 3, DType::float32));
  for (std::size_t i = 0; i < g.grid.values.size(); ++i) g.grid.values[i] = static_cast<float>(i);
  const auto a = nrf_features(g, 0, 0);
  EXPECT_EQ(a.schema, FeatureSchema::nrf);
  EXPECT_EQ(a.values, (std::vector<double>{0, 4, 8}));
  EXPECT_EQ(nrf_features(g, 13, 13).values, a.values);
  EXPECT_EQ(nrf_features(g, 14, 14).values, (std::vector<double>{3, 7, 11}));
  EXPECT_THROW(nrf_features(g, 28, 0), DomainError);
  EXPECT_THROW(nrf_features(g, -1, 0), DomainError);
}

TEST(NrfFeatures, FullWidthEmbeddings) {
  EmbeddingGrid g;
  g.grid = make_raster<float>(make_header(3, 3, 7.0, 0, 0, 32633, 1024, DType::float32), 0.25f);
  EXPECT_EQ(nrf_features(g, 20, 30).values.size(), 1024u);
  EXPECT_EQ(feature_names(FeatureSchema::nrf, 1024).back(), "emb_1023");
}
