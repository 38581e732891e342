#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "lidar_anchor/error.hpp"
#include "lidar_anchor/photon_pipeline.hpp"

namespace lidar_anchor {

namespace {

struct KeyHash {
  std::size_t operator()(const std::pair<std::int64_t, std::int64_t>& k) const noexcept {
    return std::hash<std::int64_t>{}(k.first * 0x9E3779B97F4A7C15LL ^ k.second);
  }
};

}  // namespace

DbscanResult dbscan_cluster(std::span<const NormalizedPhoton> photons, const ClusterParams& params) {
  if (!(params.eps > 0.0)) throw DomainError("dbscan: eps must be positive");
  if (params.min_pts < 1) throw DomainError("dbscan: min_pts must be at least 1");

  const std::size_t n = photons.size();
  DbscanResult result;
  if (n == 0) return result;

  // Work in id order so labels never depend on input order.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return photons[a].id < photons[b].id; });

  const double eps = params.eps;
  const double eps2 = eps * eps;
  const auto dist2 = [&](std::size_t a, std::size_t b) {
    const double dx = photons[a].x - photons[b].x;
    const double dy = photons[a].y - photons[b].y;
    const double dz = params.height_weight * (photons[a].h_ag - photons[b].h_ag);
    return dx * dx + dy * dy + dz * dz;
  };

  std::unordered_map<std::pair<std::int64_t, std::int64_t>, std::vector<std::size_t>, KeyHash> grid;
  const auto cell_of = [&](std::size_t i) {
    return std::pair{static_cast<std::int64_t>(std::floor(photons[i].x / eps)),
                     static_cast<std::int64_t>(std::floor(photons[i].y / eps))};
  };
  for (std::size_t i : order) grid[cell_of(i)].push_back(i);

  // Neighborhoods (self included), each listed in id order.
  std::vector<std::vector<std::size_t>> neighbors(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto [cx, cy] = cell_of(i);
    auto& list = neighbors[i];
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        const auto it = grid.find({cx + dx, cy + dy});
        if (it == grid.end()) continue;
        for (std::size_t j : it->second) {
          if (dist2(i, j) <= eps2) list.push_back(j);
        }
      }
    }
    std::sort(list.begin(), list.end(), [&](std::size_t a, std::size_t b) { return photons[a].id < photons[b].id; });
  }

  std::vector<char> core(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    core[i] = neighbors[i].size() >= static_cast<std::size_t>(params.min_pts);
  }

  // Connected components of core points.
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> label(n, kNone);
  std::size_t next_label = 0;
  std::vector<std::size_t> stack;
  for (std::size_t seed : order) {
    if (!core[seed] || label[seed] != kNone) continue;
    label[seed] = next_label;
    stack.assign(1, seed);
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      for (std::size_t q : neighbors[p]) {
        if (core[q] && label[q] == kNone) {
          label[q] = next_label;
          stack.push_back(q);
        }
      }
    }
    ++next_label;
  }

  // Border points follow their nearest core neighbor.
  for (std::size_t i : order) {
    if (core[i]) continue;
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_core = kNone;
    for (std::size_t q : neighbors[i]) {
      if (!core[q]) continue;
      const double d = dist2(i, q);
      if (d < best) {
        best = d;
        best_core = q;
      }
    }
    if (best_core != kNone) label[i] = label[best_core];
  }

  result.clusters.resize(next_label);
  for (std::size_t i : order) {
    if (label[i] == kNone) {
      result.noise.push_back(i);
    } else {
      result.clusters[label[i]].push_back(i);
    }
  }
  std::sort(result.clusters.begin(), result.clusters.end(),
            [&](const auto& a, const auto& b) { return photons[a.front()].id < photons[b.front()].id; });
  return result;
}

}  // namespace lidar_anchor
