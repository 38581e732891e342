#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lidar_anchor/raster.hpp"
#include "lidar_anchor/raster_ops.hpp"

namespace lidar_anchor {

enum class FeatureSchema { hrf27, nrf };

std::string to_string(FeatureSchema s);
/// Throws SchemaError for unknown ids.
FeatureSchema schema_from_string(const std::string& s);

struct FeatureVector {
  std::vector<double> values;
  FeatureSchema schema = FeatureSchema::hrf27;
};

inline constexpr int kHrfFeatureCount = 27;

/// Frozen HRF layout. Persisted models index features by position, so this
/// order must never change.
///   0-5   prediction mean, std, min, max, p90, p10
///   6-8   Sobel magnitude mean, std, p95
///   9-14  R mean, R std, G mean, G std, B mean, B std   (channels in [0,1])
///   15-16 mean and std of (G-R)/(G+R+1e-6)
///   17    mean(R) / (mean(G) + 1e-6)
///   18-25 land-cover fractions, classes 0..7
///   26    Shannon entropy of the fractions (natural log)
const std::vector<std::string>& hrf_feature_names();

/// Importance group of an HRF feature: prediction_stats, gradient, optical or land_cover.
const char* hrf_feature_group(int index);

/// Names for a schema of the given width ("emb_0".. for embeddings).
std::vector<std::string> feature_names(FeatureSchema schema, int dim);

/// Handcrafted features of aligned windows. `pred` marks nodata as NaN.
/// Throws DomainError when sizes differ, the windows are smaller than 3x3, the
/// optical window is not 3-band, or the prediction window has no valid pixel.
FeatureVector hrf_features(const Patch<double>& pred, const Patch<std::uint8_t>& optical,
                           const Patch<std::uint8_t>& lc,
                           std::optional<double> lc_nodata = std::nullopt);

/// Embedding vector of the cell containing image pixel (col,row).
/// Throws DomainError outside the grid's image footprint.
FeatureVector nrf_features(const EmbeddingGrid& grid, int col, int row);

}  // namespace lidar_anchor
