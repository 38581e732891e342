#include "lidar_anchor/residual.hpp"

#include <cmath>
#include <fstream>
#include <optional>

#include "lidar_anchor/error.hpp"
#include "lidar_anchor/kernels.hpp"
#include "lidar_anchor/parallel.hpp"
#include "lidar_anchor/raster_ops.hpp"

namespace lidar_anchor {

namespace {

void check_patch(int patch) {
  if (patch < 3) throw DomainError("patch size must be at least 3");
}

}  // namespace

FeatureContext FeatureContext::hrf(const HeightRaster& pred, const OpticalRaster& optical,
                                   const LandCoverRaster& lc, int patch) {
  check_patch(patch);
  require_same_geometry(pred.header, optical.header, "optical image");
  require_same_geometry(pred.header, lc.header, "land-cover map");
  if (optical.bands() != 3) throw DomainError("optical image must have 3 bands");
  FeatureContext c;
  c.schema_ = FeatureSchema::hrf27;
  c.pred_ = &pred;
  c.optical_ = &optical;
  c.lc_ = &lc;
  c.patch_ = patch;
  return c;
}

FeatureContext FeatureContext::nrf(const HeightRaster& pred, const EmbeddingGrid& embeddings, int patch) {
  check_patch(patch);
  if (!embeddings.covers(pred.width(), pred.height())) {
    throw DomainError("embedding grid does not cover the prediction raster");
  }
  FeatureContext c;
  c.schema_ = FeatureSchema::nrf;
  c.pred_ = &pred;
  c.embeddings_ = &embeddings;
  c.patch_ = patch;
  return c;
}

FeatureVector FeatureContext::at_pixel(int col, int row) const {
  if (schema_ == FeatureSchema::nrf) {
    const int c = std::clamp(col, 0, pred_->width() - 1);
    const int r = std::clamp(row, 0, pred_->height() - 1);
    return nrf_features(*embeddings_, c, r);
  }
  const Patch<double> p = height_patch(extract_window(*pred_, col, row, patch_), *pred_);
  const Patch<std::uint8_t> o = extract_window(*optical_, col, row, patch_);
  const Patch<std::uint8_t> l = extract_window(*lc_, col, row, patch_);
  return hrf_features(p, o, l, lc_->header.nodata);
}

TrainingSet build_training_set(const FeatureContext& ctx, std::span<const CleanPhoton> photons,
                               double footprint) {
  const HeightRaster& pred = ctx.pred();
  enum class Outcome { ok, outside, nodata };
  struct Slot {
    Outcome outcome = Outcome::nodata;
    FeatureVector features;
    double target = 0.0;
  };
  std::vector<Slot> slots(photons.size());

  parallel_for(photons.size(), [&](std::size_t i) {
    const CleanPhoton& p = photons[i];
    Slot& s = slots[i];
    const auto pixel = pred.header.contains(p.x, p.y) ? pred.header.containing_pixel(p.x, p.y) : std::nullopt;
    if (!pixel) {
      s.outcome = Outcome::outside;
      return;
    }
    const std::optional<double> sampled = footprint_mean(pred, p.x, p.y, footprint);
    if (!sampled) return;
    try {
      s.features = ctx.at_pixel(pixel->first, pixel->second);
    } catch (const DomainError&) {
      return;
    }
    s.target = *sampled - p.h_ag;
    s.outcome = Outcome::ok;
  });

  TrainingSet set;
  set.samples.schema = ctx.schema();
  for (std::size_t i = 0; i < slots.size(); ++i) {
    switch (slots[i].outcome) {
      case Outcome::ok:
        set.samples.add(slots[i].features, slots[i].target);
        set.locations.push_back({photons[i].x, photons[i].y});
        break;
      case Outcome::outside: ++set.skipped_outside; break;
      case Outcome::nodata: ++set.skipped_nodata; break;
    }
  }
  if (set.samples.size() == 0) throw DomainError("no clean photon yields a training sample");
  return set;
}

void save_features_csv(const TrainingSet& set, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "x,y";
  for (const std::string& name : feature_names(set.samples.schema, set.samples.n_features)) out << ',' << name;
  out << ",target\n";
  for (std::size_t i = 0; i < set.samples.size(); ++i) {
    out << format_double(set.locations[i].x) << ',' << format_double(set.locations[i].y);
    for (double v : set.samples.row(i)) out << ',' << format_double(v);
    out << ',' << format_double(set.samples.y[i]) << '\n';
  }
  if (!out) throw IoError("short write to " + path.string());
}

std::vector<int> window_origins(int extent, int patch, int stride) {
  if (stride < 1) throw DomainError("stride must be at least 1");
  check_patch(patch);
  std::vector<int> out;
  if (extent <= patch) return {0};
  for (int p = 0; p + patch <= extent; p += stride) out.push_back(p);
  if (out.back() + patch < extent) out.push_back(extent - patch);
  return out;
}

HeightRaster ResidualField::to_raster() const {
  HeightRaster r = make_raster<float>(header);
  r.header.bands = 1;
  r.header.nodata.reset();
  for (std::size_t i = 0; i < values.size(); ++i) r.values[i] = static_cast<float>(values[i]);
  return r;
}

ResidualField infer_residual_field(const FeatureContext& ctx, const RandomForest& model, int stride) {
  if (model.schema != ctx.schema()) {
    throw SchemaError("model expects " + to_string(model.schema) + " features but the run uses " +
                      to_string(ctx.schema()));
  }
  const HeightRaster& pred = ctx.pred();
  const int w = pred.width();
  const int h = pred.height();
  const int patch = ctx.patch();
  const std::vector<int> xs = window_origins(w, patch, stride);
  const std::vector<int> ys = window_origins(h, patch, stride);

  struct WindowResult {
    bool used = false;
    double residual = 0.0;
  };
  std::vector<WindowResult> windows(xs.size() * ys.size());
  parallel_for(windows.size(), [&](std::size_t k) {
    const int x0 = xs[k % xs.size()];
    const int y0 = ys[k / xs.size()];
    bool any_valid = false;
    for (int r = y0; r < std::min(h, y0 + patch) && !any_valid; ++r) {
      for (int c = x0; c < std::min(w, x0 + patch); ++c) {
        if (pred.valid(c, r)) {
          any_valid = true;
          break;
        }
      }
    }
    if (!any_valid) return;
    windows[k] = {true, model.predict(ctx.at_pixel(x0 + patch / 2, y0 + patch / 2))};
  });

  ResidualField field;
  field.header = pred.header;
  field.header.bands = 1;
  field.values.assign(pred.header.pixel_count(), 0.0);
  field.coverage.assign(pred.header.pixel_count(), 0);
  for (std::size_t k = 0; k < windows.size(); ++k) {
    if (!windows[k].used) continue;
    const int x0 = xs[k % xs.size()];
    const int y0 = ys[k / xs.size()];
    for (int r = y0; r < std::min(h, y0 + patch); ++r) {
      for (int c = x0; c < std::min(w, x0 + patch); ++c) {
        const std::size_t i = static_cast<std::size_t>(r) * static_cast<std::size_t>(w) + static_cast<std::size_t>(c);
        field.values[i] += windows[k].residual;
        ++field.coverage[i];
      }
    }
  }
  for (std::size_t i = 0; i < field.values.size(); ++i) {
    if (field.coverage[i] > 0) field.values[i] /= field.coverage[i];
  }
  return field;
}

HeightRaster apply_correction(const HeightRaster& pred, const ResidualField& field) {
  if (!pred.header.same_geometry(field.header) || field.values.size() != pred.header.pixel_count()) {
    throw DomainError("residual field does not match the prediction raster");
  }
  HeightRaster out = pred;
  const bool has_nodata = pred.header.nodata.has_value();
  const float nodata = has_nodata ? static_cast<float>(*pred.header.nodata) : 0.0f;
  kernels::active().subtract_clamp_f32(pred.values.data(), field.values.data(), out.values.data(),
                                       field.values.size(), has_nodata, nodata);
  return out;
}

}  // namespace lidar_anchor
