#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lidar_anchor/raster.hpp"

namespace lidar_anchor {

/// Mean |pred - ref| over pixels valid in both rasters.
/// Throws DomainError on geometry mismatch or an empty intersection.
double mae(const HeightRaster& pred, const HeightRaster& ref);
double rmse(const HeightRaster& pred, const HeightRaster& ref);

struct SsimParams {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  /// Overrides L; by default L = max(ref) - min(ref), at least 1 m.
  std::optional<double> dynamic_range;
};

/// Dynamic range used by ssim() for this reference.
double ssim_dynamic_range(const HeightRaster& ref, const SsimParams& params = {});

/// Mean SSIM over every window position with local statistics under a
/// normalized Gaussian window; windows touching nodata are excluded.
/// Throws DomainError when a raster is smaller than the window or no window is valid.
double ssim(const HeightRaster& pred, const HeightRaster& ref, const SsimParams& params = {});

struct F1Result {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  bool precision_undefined = false;  ///< no pixel predicted above T
  bool recall_undefined = false;     ///< no reference pixel above T
};

inline constexpr double kHeightRatioFloor = 0.1;

/// Height-aware F1 over pixels valid in both rasters. A pixel is a true
/// positive when both heights exceed T and their ratio max(p/r, r/p), with
/// both floored at 0.1 m, is below eta. Undefined precision or recall is
/// reported as 0 with the matching flag set.
F1Result f1_he(const HeightRaster& pred, const HeightRaster& ref, double T = 1.0, double eta = 1.25);

struct MetricsParams {
  double T = 1.0;
  double eta = 1.25;
  SsimParams ssim;
};

struct MetricsReport {
  double mae = 0.0;
  double rmse = 0.0;
  std::optional<double> ssim;  ///< absent when the raster is too small or no window is valid
  F1Result f1;
  std::size_t n_valid = 0;
  double T = 1.0;
  double eta = 1.25;
  int ssim_window = 11;
  double L = 1.0;
};

MetricsReport evaluate(const HeightRaster& pred, const HeightRaster& ref, const MetricsParams& params = {});

std::string metrics_to_json(const MetricsReport& report);

struct ClassMetrics {
  int lc_class = 0;
  std::size_t n = 0;
  double mae = 0.0;
  double rmse = 0.0;
  double bias = 0.0;  ///< mean(pred - ref)
};

/// Error statistics per land-cover class; classes without pixels are omitted.
std::vector<ClassMetrics> stratify_by_landcover(const HeightRaster& pred, const HeightRaster& ref,
                                                const LandCoverRaster& lc);
void save_strata_csv(const std::vector<ClassMetrics>& strata, const std::filesystem::path& path);

}  // namespace lidar_anchor
