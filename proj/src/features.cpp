#include "lidar_anchor/features.hpp"

#include <algorithm>
#include <cmath>
#include <span>

#include "lidar_anchor/error.hpp"

namespace lidar_anchor {

std::string to_string(FeatureSchema s) { return s == FeatureSchema::hrf27 ? "hrf27" : "nrf"; }

FeatureSchema schema_from_string(const std::string& s) {
  if (s == "hrf27") return FeatureSchema::hrf27;
  if (s == "nrf") return FeatureSchema::nrf;
  throw SchemaError("unknown feature schema '" + s + "'");
}

const std::vector<std::string>& hrf_feature_names() {
  static const std::vector<std::string> names = {
      "pred_mean",    "pred_std",     "pred_min",       "pred_max",      "pred_p90",
      "pred_p10",     "grad_mean",    "grad_std",       "grad_p95",      "r_mean",
      "r_std",        "g_mean",       "g_std",          "b_mean",        "b_std",
      "gr_index_mean", "gr_index_std", "rg_ratio",      "lc_bareland",   "lc_rangeland",
      "lc_developed", "lc_road",      "lc_tree",        "lc_water",      "lc_agriculture",
      "lc_building",  "lc_entropy",
  };
  return names;
}

const char* hrf_feature_group(int index) {
  if (index < 0 || index >= kHrfFeatureCount) return "unknown";
  if (index <= 5) return "prediction_stats";
  if (index <= 8) return "gradient";
  if (index <= 17) return "optical";
  return "land_cover";
}

std::vector<std::string> feature_names(FeatureSchema schema, int dim) {
  if (schema == FeatureSchema::hrf27) return hrf_feature_names();
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(dim));
  for (int i = 0; i < dim; ++i) names.push_back("emb_" + std::to_string(i));
  return names;
}

namespace {

struct Moments {
  double mean = 0.0;
  double std = 0.0;
};

Moments moments(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  const double mean = sum / static_cast<double>(v.size());
  double sq = 0.0;
  for (double x : v) sq += (x - mean) * (x - mean);
  return {mean, std::sqrt(sq / static_cast<double>(v.size()))};
}

}  // namespace

FeatureVector hrf_features(const Patch<double>& pred, const Patch<std::uint8_t>& optical,
                           const Patch<std::uint8_t>& lc, std::optional<double> lc_nodata) {
  const int n = pred.size;
  if (optical.size != n || lc.size != n) throw DomainError("hrf_features: patch size mismatch");
  if (n < 3) throw DomainError("hrf_features: patches must be at least 3x3");
  if (optical.bands != 3) throw DomainError("hrf_features: optical patch must have 3 bands");
  const std::size_t count = static_cast<std::size_t>(n) * n;

  FeatureVector fv;
  fv.schema = FeatureSchema::hrf27;
  fv.values.reserve(kHrfFeatureCount);

  // Prediction statistics over valid cells.
  std::vector<double> valid;
  valid.reserve(count);
  for (double v : pred.values) {
    if (!std::isnan(v)) valid.push_back(v);
  }
  if (valid.empty()) throw DomainError("hrf_features: prediction window has no valid pixel");
  const Moments pm = moments(valid);
  std::vector<double> sorted = valid;
  std::sort(sorted.begin(), sorted.end());
  fv.values.insert(fv.values.end(), {pm.mean, pm.std, sorted.front(), sorted.back(),
                                     percentile_sorted(sorted, 90.0), percentile_sorted(sorted, 10.0)});

  // Gradient statistics; nodata cells are filled with the valid mean first.
  Patch<double> filled = pred;
  for (double& v : filled.values) {
    if (std::isnan(v)) v = pm.mean;
  }
  const Patch<double> grad = sobel_magnitude(filled);
  std::vector<double> g;
  g.reserve(valid.size());
  for (std::size_t i = 0; i < count; ++i) {
    if (!std::isnan(pred.values[i])) g.push_back(grad.values[i]);
  }
  const Moments gm = moments(g);
  std::sort(g.begin(), g.end());
  fv.values.insert(fv.values.end(), {gm.mean, gm.std, percentile_sorted(g, 95.0)});

  // Optical statistics on channels scaled to [0,1].
  std::vector<double> ch[3];
  std::vector<double> index;
  for (auto& c : ch) c.reserve(count);
  index.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double r = optical.values[i * 3 + 0] / 255.0;
    const double gg = optical.values[i * 3 + 1] / 255.0;
    const double b = optical.values[i * 3 + 2] / 255.0;
    ch[0].push_back(r);
    ch[1].push_back(gg);
    ch[2].push_back(b);
    index.push_back((gg - r) / (gg + r + 1e-6));
  }
  const Moments rm = moments(ch[0]);
  const Moments gmo = moments(ch[1]);
  const Moments bm = moments(ch[2]);
  const Moments im = moments(index);
  fv.values.insert(fv.values.end(), {rm.mean, rm.std, gmo.mean, gmo.std, bm.mean, bm.std, im.mean,
                                     im.std, rm.mean / (gmo.mean + 1e-6)});

  // Land-cover composition.
  std::size_t hist[kLandCoverClasses] = {};
  std::size_t labelled = 0;
  for (std::uint8_t code : lc.values) {
    if (lc_nodata && static_cast<double>(code) == *lc_nodata) continue;
    if (code >= kLandCoverClasses) continue;
    ++hist[code];
    ++labelled;
  }
  double entropy = 0.0;
  for (std::size_t h : hist) {
    const double p = labelled ? static_cast<double>(h) / static_cast<double>(labelled) : 0.0;
    fv.values.push_back(p);
    if (p > 0.0) entropy -= p * std::log(p);
  }
  fv.values.push_back(entropy);
  return fv;
}

FeatureVector nrf_features(const EmbeddingGrid& grid, int col, int row) {
  if (col < 0 || row < 0) throw DomainError("nrf_features: pixel outside embedding grid");
  const int cx = col / grid.cell_px;
  const int cy = row / grid.cell_px;
  if (cx >= grid.cells_x() || cy >= grid.cells_y()) {
    throw DomainError("nrf_features: pixel outside embedding grid");
  }
  FeatureVector fv;
  fv.schema = FeatureSchema::nrf;
  fv.values.resize(static_cast<std::size_t>(grid.dim()));
  for (int b = 0; b < grid.dim(); ++b) {
    fv.values[static_cast<std::size_t>(b)] = static_cast<double>(grid.grid.at(cx, cy, b));
  }
  return fv;
}

}  // namespace lidar_anchor
