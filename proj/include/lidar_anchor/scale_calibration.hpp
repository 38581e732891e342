#pragma once

#include <span>

#include "lidar_anchor/photon.hpp"
#include "lidar_anchor/raster.hpp"

namespace lidar_anchor {

/// height = a * depth + b, with fit diagnostics over the points used.
struct AffineFit {
  double a = 1.0;
  double b = 0.0;
  int n_points = 0;
  double rmse = 0.0;
};

struct AffineFitOptions {
  /// Diameter of the disk averaged around each photon when sampling depth;
  /// anything below the pixel size reads the containing pixel.
  double footprint = 0.0;
  /// Huber-weighted iteratively reweighted least squares instead of OLS.
  bool robust = false;
  double huber_threshold = 1.0;
  int huber_iterations = 10;
};

inline constexpr int kMinAffinePoints = 10;

/// Least-squares fit of photon h_ag against sampled depth over every clean
/// photon (ground and object). Samples are sorted before accumulation so the
/// result does not depend on photon order. Throws DomainError with fewer than
/// kMinAffinePoints usable samples or constant depth.
AffineFit fit_affine(const HeightRaster& depth, std::span<const CleanPhoton> photons,
                     const AffineFitOptions& options = {});

/// Per-pixel a * d + b; nodata cells are preserved and nothing is clamped.
HeightRaster apply_affine(const HeightRaster& depth, const AffineFit& fit);

}  // namespace lidar_anchor
