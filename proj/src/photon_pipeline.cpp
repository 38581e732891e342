#include "lidar_anchor/photon_pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include <spdlog/spdlog.h>

#include "lidar_anchor/error.hpp"
#include "lidar_anchor/parallel.hpp"
#include "lidar_anchor/raster_ops.hpp"

namespace lidar_anchor {

std::vector<Photon> filter_confidence(std::span<const Photon> photons) {
  std::vector<Photon> out;
  out.reserve(photons.size());
  for (const Photon& p : photons) {
    const bool confident = p.signal_conf == 3 || p.signal_conf == 4;
    const bool usable = p.atl08_class == AtlClass::ground || p.atl08_class == AtlClass::top_of_canopy;
    if (confident && usable) out.push_back(p);
  }
  return out;
}

namespace {

struct Candidate {
  double dist;
  std::int64_t id;
  double elev;
};

std::optional<double> weighted_mean(std::vector<Candidate>& cands, const IdwParams& params) {
  if (cands.empty()) return std::nullopt;
  std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    return a.dist != b.dist ? a.dist < b.dist : a.id < b.id;
  });
  if (cands.front().dist < kIdwCoincidence) return cands.front().elev;
  const std::size_t k = std::min<std::size_t>(cands.size(), static_cast<std::size_t>(params.k_max));
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double w = 1.0 / std::pow(cands[i].dist, params.power);
    num += w * cands[i].elev;
    den += w;
  }
  return num / den;
}

void check_idw_params(const IdwParams& p) {
  if (!(p.power > 0.0)) throw DomainError("IDW power must be positive");
  if (!(p.radius > 0.0)) throw DomainError("IDW radius must be positive");
  if (p.k_max < 1) throw DomainError("IDW k_max must be at least 1");
}

}  // namespace

std::optional<double> interpolate_ground_idw(std::span<const Photon> photons, const GroundQuery& q,
                                             const IdwParams& params) {
  check_idw_params(params);
  std::vector<Candidate> cands;
  for (const Photon& p : photons) {
    if (p.atl08_class != AtlClass::ground || p.beam != q.beam) continue;
    const double dist = std::hypot(p.x - q.x, p.y - q.y);
    if (dist <= params.radius) cands.push_back({dist, p.id, p.elev});
  }
  return weighted_mean(cands, params);
}

GroundIndex::GroundIndex(std::span<const Photon> photons, double bucket_size) : bucket_(bucket_size) {
  if (!(bucket_size > 0.0)) throw DomainError("GroundIndex bucket size must be positive");
  for (const Photon& p : photons) {
    if (p.atl08_class != AtlClass::ground) continue;
    const auto bx = static_cast<std::int64_t>(std::floor(p.x / bucket_));
    const auto by = static_cast<std::int64_t>(std::floor(p.y / bucket_));
    buckets_[{p.beam, bx, by}].push_back(ground_.size());
    ground_.push_back(p);
  }
}

std::optional<double> GroundIndex::interpolate(const GroundQuery& q, const IdwParams& params) const {
  check_idw_params(params);
  const auto bx0 = static_cast<std::int64_t>(std::floor((q.x - params.radius) / bucket_));
  const auto bx1 = static_cast<std::int64_t>(std::floor((q.x + params.radius) / bucket_));
  const auto by0 = static_cast<std::int64_t>(std::floor((q.y - params.radius) / bucket_));
  const auto by1 = static_cast<std::int64_t>(std::floor((q.y + params.radius) / bucket_));
  std::vector<Candidate> cands;
  for (auto bx = bx0; bx <= bx1; ++bx) {
    for (auto by = by0; by <= by1; ++by) {
      const auto it = buckets_.find({q.beam, bx, by});
      if (it == buckets_.end()) continue;
      for (std::size_t i : it->second) {
        const Photon& p = ground_[i];
        const double dist = std::hypot(p.x - q.x, p.y - q.y);
        if (dist <= params.radius) cands.push_back({dist, p.id, p.elev});
      }
    }
  }
  return weighted_mean(cands, params);
}

GroundEstimate enforce_dtm_consistency(std::optional<double> idw_value, const HeightRaster& dtm,
                                       double x, double y, double tau, std::int64_t photon_id) {
  if (!dtm.header.contains(x, y)) throw DomainError("enforce_dtm_consistency: point outside DTM");
  const std::optional<double> dtm_value = sample_bilinear(dtm, x, y);
  if (!idw_value) {
    if (!dtm_value) throw DomainError("no IDW ground and no DTM value at photon");
    return {photon_id, *dtm_value, GroundSource::dtm_fallback};
  }
  if (dtm_value && std::fabs(*idw_value - *dtm_value) > tau) {
    return {photon_id, *dtm_value, GroundSource::dtm_override};
  }
  return {photon_id, *idw_value, GroundSource::idw};
}

NormalizeResult normalize_heights(std::span<const Photon> photons, std::span<const GroundEstimate> estimates,
                                  const NormalizeParams& params) {
  std::unordered_map<std::int64_t, double> ground;
  ground.reserve(estimates.size());
  for (const GroundEstimate& e : estimates) ground[e.photon_id] = e.ground_elev;

  NormalizeResult result;
  result.photons.reserve(photons.size());
  for (const Photon& p : photons) {
    const auto it = ground.find(p.id);
    if (it == ground.end()) {
      throw DomainError("normalize_heights: photon " + std::to_string(p.id) + " has no ground estimate");
    }
    NormalizedPhoton n{p.id, p.x, p.y, 0.0, PhotonKind::ground, p.beam, -1};
    if (p.atl08_class != AtlClass::ground) {
      const double h = p.elev - it->second;
      if (h < params.discard_below) {
        ++result.discarded;
        continue;
      }
      if (h > 0.0) {
        n.h_ag = h;
        n.kind = PhotonKind::object;
      }
    }
    result.photons.push_back(n);
  }
  return result;
}

std::vector<NormalizedPhoton> landcover_plausibility_filter(std::span<const NormalizedPhoton> photons,
                                                            const LandCoverRaster& lc,
                                                            const PlausibilityBounds& bounds) {
  std::vector<NormalizedPhoton> out;
  out.reserve(photons.size());
  for (const NormalizedPhoton& p : photons) {
    const auto px = lc.header.containing_pixel(p.x, p.y);
    if (!px) {
      throw DomainError("landcover_plausibility_filter: photon " + std::to_string(p.id) +
                        " outside land-cover raster");
    }
    const std::uint8_t code = lc.at(px->first, px->second);
    const int cls = lc.is_nodata(code) ? -1 : static_cast<int>(code);
    NormalizedPhoton kept = p;
    if (p.kind == PhotonKind::object) {
      bool ok = false;
      if (cls == static_cast<int>(LandCover::tree)) {
        ok = p.h_ag > bounds.tree_min && p.h_ag <= bounds.tree_max;
      } else if (cls == static_cast<int>(LandCover::building)) {
        ok = p.h_ag > bounds.building_min && p.h_ag <= bounds.building_max;
      }
      if (!ok) continue;
    } else if (cls < 0) {
      // Ground anchors need some class for the clean-photon record.
      kept.lc_class = 0;
      out.push_back(kept);
      continue;
    }
    kept.lc_class = cls;
    out.push_back(kept);
  }
  return out;
}

std::vector<CleanPhoton> aggregate_cells(std::span<const PhotonCluster> clusters,
                                         std::span<const NormalizedPhoton> ground, double cell) {
  if (!(cell > 0.0)) throw DomainError("aggregate_cells: cell size must be positive");
  std::vector<CleanPhoton> out;
  out.reserve(ground.size() + clusters.size());
  for (const NormalizedPhoton& g : ground) {
    out.push_back({g.x, g.y, 0.0, PhotonKind::ground, std::max(g.lc_class, 0), 1});
  }

  struct Centroid {
    CleanPhoton photon;
    std::int64_t first_id;
    std::size_t order;
  };
  std::vector<Centroid> centroids;
  centroids.reserve(clusters.size());
  for (std::size_t ci = 0; ci < clusters.size(); ++ci) {
    const auto& members = clusters[ci].members;
    if (members.empty()) continue;
    double sx = 0.0, sy = 0.0, sh = 0.0;
    int votes[kLandCoverClasses] = {};
    std::int64_t first_id = members.front().id;
    for (const NormalizedPhoton& m : members) {
      sx += m.x;
      sy += m.y;
      sh += m.h_ag;
      if (m.lc_class >= 0 && m.lc_class < kLandCoverClasses) ++votes[m.lc_class];
      first_id = std::min(first_id, m.id);
    }
    const double n = static_cast<double>(members.size());
    const int lc = static_cast<int>(std::max_element(std::begin(votes), std::end(votes)) - std::begin(votes));
    centroids.push_back({{sx / n, sy / n, sh / n, PhotonKind::object, lc, static_cast<int>(members.size())},
                         first_id,
                         ci});
  }

  // Winner per grid square.
  std::map<std::pair<std::int64_t, std::int64_t>, std::size_t> winner;
  const auto better = [](const Centroid& a, const Centroid& b) {
    if (a.photon.cluster_size != b.photon.cluster_size) return a.photon.cluster_size > b.photon.cluster_size;
    if (a.photon.h_ag != b.photon.h_ag) return a.photon.h_ag < b.photon.h_ag;
    return a.first_id < b.first_id;
  };
  for (std::size_t i = 0; i < centroids.size(); ++i) {
    const auto key = std::pair{static_cast<std::int64_t>(std::floor(centroids[i].photon.x / cell)),
                               static_cast<std::int64_t>(std::floor(centroids[i].photon.y / cell))};
    auto [it, inserted] = winner.emplace(key, i);
    if (!inserted && better(centroids[i], centroids[it->second])) it->second = i;
  }
  std::vector<std::size_t> kept;
  kept.reserve(winner.size());
  for (const auto& [key, idx] : winner) kept.push_back(idx);
  std::sort(kept.begin(), kept.end());
  for (std::size_t idx : kept) out.push_back(centroids[idx].photon);
  return out;
}

PreprocessResult preprocess_photons(std::span<const Photon> photons, const HeightRaster& dtm,
                                    const LandCoverRaster& lc, const PreprocessParams& params) {
  PreprocessResult result;
  result.counts.input = photons.size();

  std::vector<Photon> in_extent;
  in_extent.reserve(photons.size());
  for (const Photon& p : photons) {
    if (lc.header.contains(p.x, p.y) && dtm.header.contains(p.x, p.y)) in_extent.push_back(p);
  }
  result.counts.in_extent = in_extent.size();

  const std::vector<Photon> confident = filter_confidence(in_extent);
  result.counts.confidence = confident.size();

  // Ground reference per photon; slots keep the result independent of threads.
  const GroundIndex index(confident, std::max(params.idw.radius / 4.0, 1.0));
  std::vector<std::optional<GroundEstimate>> slots(confident.size());
  parallel_for(confident.size(), [&](std::size_t i) {
    const Photon& p = confident[i];
    const auto idw = index.interpolate({p.x, p.y, p.beam}, params.idw);
    const auto dtm_value = sample_bilinear(dtm, p.x, p.y);
    if (!idw && !dtm_value) return;
    slots[i] = enforce_dtm_consistency(idw, dtm, p.x, p.y, params.dtm_tau, p.id);
  });
  std::vector<Photon> referenced;
  std::vector<GroundEstimate> estimates;
  for (std::size_t i = 0; i < confident.size(); ++i) {
    if (!slots[i]) continue;
    referenced.push_back(confident[i]);
    estimates.push_back(*slots[i]);
    switch (slots[i]->source) {
      case GroundSource::idw: ++result.ground_idw; break;
      case GroundSource::dtm_fallback: ++result.ground_dtm_fallback; break;
      case GroundSource::dtm_override: ++result.ground_dtm_override; break;
    }
  }

  const NormalizeResult normalized = normalize_heights(referenced, estimates, params.normalize);
  result.counts.normalized = normalized.photons.size();

  const std::vector<NormalizedPhoton> consistent =
      landcover_plausibility_filter(normalized.photons, lc, params.bounds);
  result.counts.landcover = consistent.size();

  std::vector<NormalizedPhoton> ground;
  std::map<int, std::vector<NormalizedPhoton>> objects_by_beam;
  for (const NormalizedPhoton& p : consistent) {
    if (p.kind == PhotonKind::ground) {
      ground.push_back(p);
    } else {
      objects_by_beam[p.beam].push_back(p);
    }
  }

  std::vector<const std::vector<NormalizedPhoton>*> beams;
  for (const auto& [beam, members] : objects_by_beam) beams.push_back(&members);
  std::vector<DbscanResult> per_beam(beams.size());
  parallel_for(beams.size(), [&](std::size_t b) { per_beam[b] = dbscan_cluster(*beams[b], params.cluster); });

  std::vector<PhotonCluster> clusters;
  for (std::size_t b = 0; b < beams.size(); ++b) {
    result.noise += per_beam[b].noise.size();
    for (const auto& members : per_beam[b].clusters) {
      PhotonCluster c;
      c.members.reserve(members.size());
      for (std::size_t idx : members) c.members.push_back((*beams[b])[idx]);
      clusters.push_back(std::move(c));
    }
  }
  std::stable_sort(clusters.begin(), clusters.end(), [](const PhotonCluster& a, const PhotonCluster& b) {
    return a.members.front().id < b.members.front().id;
  });
  result.clusters = clusters.size();

  result.clean = aggregate_cells(clusters, ground, params.cell);
  result.counts.clean = result.clean.size();
  spdlog::debug("preprocess: {} -> {} -> {} -> {} -> {} -> {} photons", result.counts.input,
                result.counts.in_extent, result.counts.confidence, result.counts.normalized,
                result.counts.landcover, result.counts.clean);
  return result;
}

}  // namespace lidar_anchor
