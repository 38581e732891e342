#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "lidar_anchor/features.hpp"
#include "lidar_anchor/forest.hpp"
#include "lidar_anchor/photon.hpp"
#include "lidar_anchor/raster.hpp"

namespace lidar_anchor {

/// Computes feature vectors for windows of a co-registered raster stack.
/// Holds pointers to the rasters, which must outlive the context.
class FeatureContext {
 public:
  /// Handcrafted features from prediction, optical and land-cover windows.
  static FeatureContext hrf(const HeightRaster& pred, const OpticalRaster& optical,
                            const LandCoverRaster& lc, int patch);
  /// Embedding lookups; the grid must cover the prediction raster.
  static FeatureContext nrf(const HeightRaster& pred, const EmbeddingGrid& embeddings, int patch);

  FeatureSchema schema() const noexcept { return schema_; }
  int patch() const noexcept { return patch_; }
  const HeightRaster& pred() const noexcept { return *pred_; }

  /// Features of the patch x patch window centered on pixel (col,row).
  /// Throws DomainError when an HRF window has no valid prediction pixel.
  FeatureVector at_pixel(int col, int row) const;

 private:
  FeatureContext() = default;
  FeatureSchema schema_ = FeatureSchema::hrf27;
  const HeightRaster* pred_ = nullptr;
  const OpticalRaster* optical_ = nullptr;
  const LandCoverRaster* lc_ = nullptr;
  const EmbeddingGrid* embeddings_ = nullptr;
  int patch_ = 64;
};

struct TrainingSet {
  SampleSet samples;
  std::vector<Point> locations;     ///< photon position of each sample
  std::size_t skipped_nodata = 0;   ///< no prediction value or valid window at the photon
  std::size_t skipped_outside = 0;  ///< photon outside the prediction raster
};

/// One sample per clean photon: features of the window centered on the
/// photon's pixel, target = prediction sampled over `footprint` minus h_ag.
/// Throws DomainError when no photon yields a usable sample.
TrainingSet build_training_set(const FeatureContext& ctx, std::span<const CleanPhoton> photons,
                               double footprint = 0.0);

void save_features_csv(const TrainingSet& set, const std::filesystem::path& path);

/// Window origins along one axis: 0, stride, 2*stride, ... plus a final
/// window flush with the far edge so every pixel is covered.
std::vector<int> window_origins(int extent, int patch, int stride);

struct ResidualField {
  RasterHeader header;
  std::vector<double> values;          ///< mean of covering window predictions
  std::vector<std::uint32_t> coverage; ///< windows contributing to each pixel

  HeightRaster to_raster() const;
};

/// Slides a patch x patch window with the given stride, predicts one residual
/// per window and averages overlapping predictions per pixel. Windows with
/// no valid prediction pixel are skipped; uncovered pixels get 0.
ResidualField infer_residual_field(const FeatureContext& ctx, const RandomForest& model, int stride);

/// max(pred - residual, 0) per pixel; nodata preserved.
HeightRaster apply_correction(const HeightRaster& pred, const ResidualField& field);

}  // namespace lidar_anchor
