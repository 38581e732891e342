#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "lidar_anchor/photon.hpp"
#include "lidar_anchor/raster.hpp"

namespace lidar_anchor {

struct SceneConfig {
  int size = 512;  ///< pixels per side, at least 128
  double gsd = 0.5;
  double building_density = 0.3;  ///< target building fraction of the scene
  double tree_density = 0.2;      ///< target tree fraction of the scene
  double building_log_mu = 2.4;   ///< lognormal building height parameters (log meters)
  double building_log_sigma = 0.45;
  double building_min_height = 3.0;
  double building_max_height = 80.0;
  double building_min_side = 5.0;  ///< meters
  double building_max_side = 20.0;
  double tree_min_height = 4.0;
  double tree_max_height = 20.0;
  double tree_min_radius = 2.0;  ///< meters
  double tree_max_radius = 5.0;
  double terrain_amplitude = 3.0;  ///< meters
  double terrain_base = 50.0;
  double block_size = 40.0;  ///< road grid spacing, meters
  double road_width = 3.0;
  double water_block_probability = 0.05;
  std::uint64_t seed = 42;
  double origin_x = 500000.0;
  double origin_y = 4100000.0;
  int crs_code = 32633;

  /// Throws DomainError for sizes below 128 or out-of-range values.
  void validate() const;
};

struct Scene {
  HeightRaster truth;  ///< above-ground heights
  OpticalRaster optical;
  LandCoverRaster lc;
  HeightRaster dtm;
  int n_buildings = 0;
  int n_trees = 0;
};

/// Road grid, non-overlapping rectangular buildings with lognormal heights,
/// flat disk trees, occasional ponds, smooth terrain and flat-shaded colors.
/// Pure function of the config.
Scene generate_scene(const SceneConfig& cfg);

struct TrackConfig {
  int n_tracks = 6;
  double azimuth = 0.0;        ///< degrees clockwise from north
  double along_spacing = 0.7;  ///< meters
  double cross_spacing = 0.0;  ///< meters; 0 spreads tracks evenly across the scene
  double footprint = 17.0;     ///< recorded in the manifest; sampling uses the pixel under the photon
  double noise_sigma = 0.1;
  double dropout = 0.0;
  /// Probability of signal_conf 0..4 (normalized before use).
  std::array<double, 5> conf_profile = {0.0, 0.0, 0.1, 0.3, 0.6};
  std::uint64_t seed = 42;

  void validate() const;
};

/// Photons along straight parallel tracks: elevation = DTM (bilinear) + truth
/// at the containing pixel + Gaussian noise; ground class where truth < 0.5 m,
/// top-of-canopy elsewhere. Beam ids are 1..n_tracks; photon ids count every
/// sample before dropout. Throws DomainError when no track crosses the scene.
std::vector<Photon> simulate_tracks(const HeightRaster& truth, const HeightRaster& dtm, const TrackConfig& cfg);

/// Samples a track visits before dropout, for the given raster extent.
std::size_t expected_track_samples(const RasterHeader& extent, const TrackConfig& cfg);

struct CorruptionConfig {
  double alpha = 1.0;
  double beta = 0.0;
  std::array<double, kLandCoverClasses> class_bias{};
  double noise_sigma = 0.0;
  double noise_correlation = 10.0;  ///< meters, Gaussian smoothing sigma of the noise field
  std::uint64_t seed = 42;

  void validate() const;
};

/// alpha * truth + beta + class_bias[lc] + correlated noise, clamped at 0.
HeightRaster corrupt_prediction(const HeightRaster& truth, const LandCoverRaster& lc, const CorruptionConfig& cfg);

// JSON mapping; missing keys keep their defaults.
void to_json(nlohmann::json& j, const SceneConfig& cfg);
void from_json(const nlohmann::json& j, SceneConfig& cfg);
void to_json(nlohmann::json& j, const TrackConfig& cfg);
void from_json(const nlohmann::json& j, TrackConfig& cfg);
void to_json(nlohmann::json& j, const CorruptionConfig& cfg);
void from_json(const nlohmann::json& j, CorruptionConfig& cfg);

}  // namespace lidar_anchor
