#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "lidar_anchor/photon_pipeline.hpp"
#include "oracles.hpp"

using namespace lidar_anchor;

namespace {

NormalizedPhoton pt(std::int64_t id, double x, double y, double h) {
  NormalizedPhoton p;
  p.id = id;
  p.x = x;
  p.y = y;
  p.h_ag = h;
  p.kind = PhotonKind::object;
  return p;
}

std::vector<std::vector<std::int64_t>> as_ids(const DbscanResult& r, const std::vector<NormalizedPhoton>& pts) {
  std::vector<std::vector<std::int64_t>> out;
  for (const auto& c : r.clusters) {
    std::vector<std::int64_t> ids;
    for (std::size_t i : c) ids.push_back(pts[i].id);
    std::sort(ids.begin(), ids.end());
    out.push_back(ids);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(Dbscan, CollinearTriple) {
  const std::vector<NormalizedPhoton> pts{pt(1, 0, 0, 5), pt(2, 1, 0, 5), pt(3, 2, 0, 5)};
  const auto r = dbscan_cluster(pts, {1.5, 3, 1.0});
  ASSERT_EQ(r.clusters.size(), 1u);
  EXPECT_EQ(r.clusters[0].size(), 3u);
  EXPECT_TRUE(r.noise.empty());
}

TEST(Dbscan, IsolatedPointIsNoise) {
  const std::vector<NormalizedPhoton> pts{pt(1, 0, 0, 5)};
  const auto r = dbscan_cluster(pts, {3.0, 3, 1.0});
  EXPECT_TRUE(r.clusters.empty());
  ASSERT_EQ(r.noise.size(), 1u);
}

TEST(Dbscan, TwoSeparatedGroups) {
  std::vector<NormalizedPhoton> pts;
  for (int i = 0; i < 5; ++i) pts.push_back(pt(i + 1, 0.5 * i, 0, 10));
  for (int i = 0; i < 5; ++i) pts.push_back(pt(i + 6, 12 + 0.5 * i, 0, 10));
  const auto r = dbscan_cluster(pts, {2.0, 3, 1.0});
  ASSERT_EQ(r.clusters.size(), 2u);
  EXPECT_EQ(r.clusters[0].size(), 5u);
  EXPECT_EQ(r.clusters[1].size(), 5u);
}

TEST(Dbscan, HeightSeparatesStackedPoints) {
  std::vector<NormalizedPhoton> pts;
  for (int i = 0; i < 4; ++i) pts.push_back(pt(i + 1, i, 0, 5));
  for (int i = 0; i < 4; ++i) pts.push_back(pt(i + 5, i, 0, 25));
  EXPECT_EQ(dbscan_cluster(pts, {1.5, 3, 1.0}).clusters.size(), 2u);
  EXPECT_EQ(dbscan_cluster(pts, {1.5, 3, 0.0}).clusters.size(), 1u);
}

TEST(Dbscan, MatchesBruteForceAndIgnoresOrder) {
  std::mt19937_64 gen(99);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + gen() % 200;
    std::uniform_real_distribution<double> pos(0, 40), h(0, 15);
    std::vector<NormalizedPhoton> pts;
    for (std::size_t i = 0; i < n; ++i) {
      // Quantized coordinates produce exact distance ties.
      pts.push_back(pt(static_cast<std::int64_t>(i) + 1, std::round(pos(gen) * 2) / 2,
                       std::round(pos(gen) * 2) / 2, std::round(h(gen))));
    }
    const ClusterParams params{1.0 + static_cast<double>(gen() % 5), 1 + static_cast<int>(gen() % 5),
                               static_cast<double>(gen() % 3) * 0.5};
    const auto want = oracle::dbscan(pts, params.eps, params.min_pts, params.height_weight);
    const auto r = dbscan_cluster(pts, params);
    ASSERT_EQ(as_ids(r, pts), want) << "trial " << trial;

    std::size_t covered = r.noise.size();
    for (const auto& c : r.clusters) covered += c.size();
    EXPECT_EQ(covered, n);

    auto shuffled = pts;
    std::shuffle(shuffled.begin(), shuffled.end(), gen);
    EXPECT_EQ(as_ids(dbscan_cluster(shuffled, params), shuffled), want);
  }
}
