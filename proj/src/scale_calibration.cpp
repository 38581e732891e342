#include "lidar_anchor/scale_calibration.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "lidar_anchor/error.hpp"
#include "lidar_anchor/kernels.hpp"
#include "lidar_anchor/raster_ops.hpp"

namespace lidar_anchor {

namespace {

struct Sample {
  double d;
  double h;
  auto operator<=>(const Sample&) const = default;
};

// Weighted least squares on centered data.
std::pair<double, double> solve(const std::vector<Sample>& s, const std::vector<double>& w) {
  double sw = 0.0, sd = 0.0, sh = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    sw += w[i];
    sd += w[i] * s[i].d;
    sh += w[i] * s[i].h;
  }
  const double md = sd / sw;
  const double mh = sh / sw;
  double sdd = 0.0, sdh = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double dd = s[i].d - md;
    sdd += w[i] * dd * dd;
    sdh += w[i] * dd * (s[i].h - mh);
  }
  if (!(sdd > 0.0)) throw DomainError("fit_affine: depth samples are constant");
  const double a = sdh / sdd;
  return {a, mh - a * md};
}

}  // namespace

AffineFit fit_affine(const HeightRaster& depth, std::span<const CleanPhoton> photons,
                     const AffineFitOptions& options) {
  std::vector<Sample> samples;
  samples.reserve(photons.size());
  for (const CleanPhoton& p : photons) {
    if (!depth.header.contains(p.x, p.y)) continue;
    const auto d = footprint_mean(depth, p.x, p.y, options.footprint);
    if (!d) continue;
    samples.push_back({*d, p.h_ag});
  }
  if (samples.size() < static_cast<std::size_t>(kMinAffinePoints)) {
    throw DomainError("fit_affine: " + std::to_string(samples.size()) + " usable points, need at least " +
                      std::to_string(kMinAffinePoints));
  }
  std::sort(samples.begin(), samples.end());
  if (samples.front().d == samples.back().d) throw DomainError("fit_affine: depth samples are constant");

  std::vector<double> weights(samples.size(), 1.0);
  auto [a, b] = solve(samples, weights);
  if (options.robust) {
    for (int it = 0; it < options.huber_iterations; ++it) {
      for (std::size_t i = 0; i < samples.size(); ++i) {
        const double r = std::fabs(samples[i].h - (a * samples[i].d + b));
        weights[i] = r <= options.huber_threshold ? 1.0 : options.huber_threshold / r;
      }
      std::tie(a, b) = solve(samples, weights);
    }
  }

  double sq = 0.0;
  for (const Sample& s : samples) {
    const double r = s.h - (a * s.d + b);
    sq += r * r;
  }
  return {a, b, static_cast<int>(samples.size()), std::sqrt(sq / static_cast<double>(samples.size()))};
}

HeightRaster apply_affine(const HeightRaster& depth, const AffineFit& fit) {
  HeightRaster out{depth.header, std::vector<float>(depth.values.size())};
  const bool has_nodata = depth.header.nodata.has_value();
  const float nodata = has_nodata ? static_cast<float>(*depth.header.nodata) : 0.0f;
  kernels::active().affine_f32(depth.values.data(), out.values.data(), out.values.size(), fit.a, fit.b,
                               has_nodata, nodata);
  return out;
}

}  // namespace lidar_anchor
