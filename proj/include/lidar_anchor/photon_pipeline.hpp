#pragma once

#include <cstddef>
#include <map>
#include <tuple>
#include <optional>
#include <span>
#include <vector>

#include "lidar_anchor/photon.hpp"
#include "lidar_anchor/raster.hpp"

namespace lidar_anchor {

// ---- Step 1: confidence filter, ground reference, normalization ----------

/// Keeps photons with signal_conf in {3,4} whose ATL08 class is ground or
/// top-of-canopy. Input order is preserved.
std::vector<Photon> filter_confidence(std::span<const Photon> photons);

struct IdwParams {
  double power = 2.0;
  double radius = 100.0;  ///< meters
  int k_max = 16;
};

struct GroundQuery {
  double x = 0.0;
  double y = 0.0;
  int beam = 0;
};

/// Distance below which a query is treated as coincident with a photon.
inline constexpr double kIdwCoincidence = 1e-6;

/// Inverse-distance-weighted ground elevation from the k_max nearest
/// ground-class photons of the query's beam within `radius` (ties in distance
/// broken by lower id). Returns nullopt when no photon qualifies. Direct scan;
/// GroundIndex gives identical results faster.
std::optional<double> interpolate_ground_idw(std::span<const Photon> photons, const GroundQuery& query,
                                             const IdwParams& params);

/// Per-beam bucket grid over ground-class photons for repeated IDW queries.
class GroundIndex {
 public:
  GroundIndex(std::span<const Photon> photons, double bucket_size);
  std::optional<double> interpolate(const GroundQuery& query, const IdwParams& params) const;

 private:
  std::vector<Photon> ground_;
  double bucket_;
  /// (beam, bucket x, bucket y) -> indices into ground_
  std::map<std::tuple<int, std::int64_t, std::int64_t>, std::vector<std::size_t>> buckets_;
};

/// Reconciles an IDW ground value with the DTM: no IDW value -> DTM sample
/// (dtm_fallback); |idw - dtm| > tau -> DTM sample (dtm_override); else IDW.
/// Throws DomainError when (x,y) is outside the DTM or the DTM has no value
/// there while one is needed.
GroundEstimate enforce_dtm_consistency(std::optional<double> idw_value, const HeightRaster& dtm,
                                       double x, double y, double tau, std::int64_t photon_id = 0);

struct NormalizeParams {
  /// Negative heights in [discard_below, 0) are clamped to 0; lower ones dropped.
  double discard_below = -2.0;
};

struct NormalizeResult {
  std::vector<NormalizedPhoton> photons;
  std::size_t discarded = 0;
};

/// h_ag = elev - ground_elev. Ground-class photons get exactly 0. Top-of-canopy
/// photons whose height clamps to 0 become ground points. Throws DomainError
/// when a photon has no estimate.
NormalizeResult normalize_heights(std::span<const Photon> photons,
                                  std::span<const GroundEstimate> estimates,
                                  const NormalizeParams& params = {});

// ---- Step 2: land-cover consistency, clustering, aggregation -------------

/// Height intervals (lo, hi] accepted for object photons per land-cover class.
struct PlausibilityBounds {
  double tree_min = 1.0;
  double tree_max = 90.0;
  double building_min = 1.0;
  double building_max = 300.0;
};

/// Object photons survive iff the land cover under them is tree or building and
/// their height is inside that class's bounds; ground photons always survive.
/// Every survivor is annotated with its land-cover class. Throws DomainError
/// for photons outside the land-cover raster.
std::vector<NormalizedPhoton> landcover_plausibility_filter(std::span<const NormalizedPhoton> photons,
                                                            const LandCoverRaster& lc,
                                                            const PlausibilityBounds& bounds = {});

struct ClusterParams {
  double eps = 3.0;  ///< meters
  int min_pts = 3;
  double height_weight = 1.0;
};

/// Clusters as lists of input indices. Members are sorted by photon id and
/// clusters by their lowest member id.
struct DbscanResult {
  std::vector<std::vector<std::size_t>> clusters;
  std::vector<std::size_t> noise;
};

/// DBSCAN over (x, y, height_weight * h_ag) with Euclidean distance <= eps.
/// Core points (at least min_pts neighbors, self included) connected through
/// core neighbors form clusters; a border point joins the cluster of its
/// nearest core neighbor (lower id on ties), which makes the partition
/// independent of input order.
DbscanResult dbscan_cluster(std::span<const NormalizedPhoton> photons, const ClusterParams& params);

struct PhotonCluster {
  std::vector<NormalizedPhoton> members;
};

/// One centroid per cluster (mean x, y, h_ag; majority land cover, lower code
/// on ties). Within each cell x cell grid square only the largest cluster's
/// centroid survives (ties: lower mean height, then lower first member id).
/// Ground photons pass through unchanged ahead of the centroids.
std::vector<CleanPhoton> aggregate_cells(std::span<const PhotonCluster> clusters,
                                         std::span<const NormalizedPhoton> ground, double cell);

// ---- Whole preprocessing chain -------------------------------------------

struct PreprocessParams {
  IdwParams idw;
  double dtm_tau = 10.0;
  NormalizeParams normalize;
  PlausibilityBounds bounds;
  ClusterParams cluster;
  double cell = 10.0;
};

/// Photon counts after each stage; non-increasing by construction.
struct StageCounts {
  std::size_t input = 0;
  std::size_t in_extent = 0;
  std::size_t confidence = 0;
  std::size_t normalized = 0;
  std::size_t landcover = 0;
  std::size_t clean = 0;
};

struct PreprocessResult {
  std::vector<CleanPhoton> clean;
  StageCounts counts;
  std::size_t ground_idw = 0;
  std::size_t ground_dtm_fallback = 0;
  std::size_t ground_dtm_override = 0;
  std::size_t clusters = 0;
  std::size_t noise = 0;
};

/// Runs every step in order. Photons outside the land-cover or DTM extent are
/// dropped first. Clustering runs per beam.
PreprocessResult preprocess_photons(std::span<const Photon> photons, const HeightRaster& dtm,
                                    const LandCoverRaster& lc, const PreprocessParams& params = {});

}  // namespace lidar_anchor
