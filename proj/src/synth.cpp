#include "lidar_anchor/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lidar_anchor/error.hpp"
#include "lidar_anchor/raster_ops.hpp"
#include "lidar_anchor/rng.hpp"

namespace lidar_anchor {

namespace {

// Stream indices under the scene seed.
enum Stream : std::uint64_t { kLayout = 1, kBuildings = 2, kTrees = 3, kTerrain = 4, kNoise = 5 };

struct Rgb {
  int r, g, b;
};

std::array<std::uint8_t, 3> shade(Rgb base, int tint) {
  const auto ch = [&](int v) { return static_cast<std::uint8_t>(std::clamp(v + tint, 0, 255)); };
  return {ch(base.r), ch(base.g), ch(base.b)};
}

Rgb class_color(LandCover c) {
  switch (c) {
    case LandCover::bareland: return {170, 150, 120};
    case LandCover::rangeland: return {140, 160, 90};
    case LandCover::developed: return {150, 150, 150};
    case LandCover::road: return {90, 90, 95};
    case LandCover::tree: return {40, 110, 45};
    case LandCover::water: return {40, 70, 130};
    case LandCover::agriculture: return {180, 170, 80};
    case LandCover::building: return {190, 120, 100};
  }
  return {0, 0, 0};
}

constexpr Rgb kRoofs[] = {{190, 120, 100}, {200, 200, 195}, {120, 110, 105}, {160, 90, 70}};

int to_px(double meters, double gsd) { return std::max(1, static_cast<int>(std::lround(meters / gsd))); }

}  // namespace

void SceneConfig::validate() const {
  if (size < 128) throw DomainError("scene size must be at least 128 pixels");
  if (!(gsd > 0.0)) throw DomainError("scene gsd must be positive");
  if (building_density < 0.0 || building_density > 1.0 || tree_density < 0.0 || tree_density > 1.0) {
    throw DomainError("scene densities must lie in [0,1]");
  }
  if (!(building_log_sigma >= 0.0)) throw DomainError("building_log_sigma must be non-negative");
  if (!(building_min_height > 0.0) || building_max_height < building_min_height) {
    throw DomainError("invalid building height range");
  }
  if (!(building_min_side > 0.0) || building_max_side < building_min_side) {
    throw DomainError("invalid building side range");
  }
  if (!(tree_min_height > 0.0) || tree_max_height < tree_min_height) throw DomainError("invalid tree height range");
  if (!(tree_min_radius > 0.0) || tree_max_radius < tree_min_radius) throw DomainError("invalid tree radius range");
  if (!(block_size > road_width) || road_width < 0.0) throw DomainError("block_size must exceed road_width");
  if (water_block_probability < 0.0 || water_block_probability > 1.0) {
    throw DomainError("water_block_probability must lie in [0,1]");
  }
}

Scene generate_scene(const SceneConfig& cfg) {
  cfg.validate();
  const int n = cfg.size;
  const double gsd = cfg.gsd;
  const RasterHeader hf = make_header(n, n, gsd, cfg.origin_x, cfg.origin_y, cfg.crs_code, 1, DType::float32);
  const RasterHeader hl = make_header(n, n, gsd, cfg.origin_x, cfg.origin_y, cfg.crs_code, 1, DType::uint8);
  const RasterHeader ho = make_header(n, n, gsd, cfg.origin_x, cfg.origin_y, cfg.crs_code, 3, DType::uint8);

  Scene s;
  s.truth = make_raster<float>(hf, 0.0f);
  s.lc = make_raster<std::uint8_t>(hl, 0);
  s.optical = make_raster<std::uint8_t>(ho, 0);
  s.dtm = make_raster<float>(hf, 0.0f);

  const auto paint = [&](int c, int r, LandCover cls, std::array<std::uint8_t, 3> rgb) {
    s.lc.at(c, r) = static_cast<std::uint8_t>(cls);
    for (int b = 0; b < 3; ++b) s.optical.at(c, r, b) = rgb[static_cast<std::size_t>(b)];
  };

  // Block layout with a road grid; each block gets a background class.
  const int block = to_px(cfg.block_size, gsd);
  const int road = cfg.road_width > 0.0 ? to_px(cfg.road_width, gsd) : 0;
  const int blocks = (n + block - 1) / block;
  std::vector<LandCover> block_class(static_cast<std::size_t>(blocks * blocks));
  std::vector<int> block_tint(block_class.size());
  CounterRng layout(CounterRng::derive(cfg.seed, kLayout));
  for (std::size_t b = 0; b < block_class.size(); ++b) {
    const double u = layout.uniform();
    const double v = layout.uniform();
    block_tint[b] = static_cast<int>(layout.below(21)) - 10;
    if (u < cfg.water_block_probability) {
      block_class[b] = LandCover::water;
    } else if (v < 0.2) {
      block_class[b] = LandCover::bareland;
    } else if (v < 0.6) {
      block_class[b] = LandCover::rangeland;
    } else if (v < 0.85) {
      block_class[b] = LandCover::developed;
    } else {
      block_class[b] = LandCover::agriculture;
    }
  }
  const auto is_road = [&](int c, int r) { return c % block < road || r % block < road; };
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      if (is_road(c, r)) {
        paint(c, r, LandCover::road, shade(class_color(LandCover::road), 0));
        continue;
      }
      const std::size_t b = static_cast<std::size_t>((r / block) * blocks + c / block);
      paint(c, r, block_class[b], shade(class_color(block_class[b]), block_tint[b]));
    }
  }

  struct Interior {
    int x0, y0, x1, y1;  // half-open pixel bounds
  };
  std::vector<Interior> interiors;
  for (int by = 0; by < blocks; ++by) {
    for (int bx = 0; bx < blocks; ++bx) {
      if (block_class[static_cast<std::size_t>(by * blocks + bx)] == LandCover::water) continue;
      const Interior in{bx * block + road, by * block + road, std::min(n, (bx + 1) * block),
                        std::min(n, (by + 1) * block)};
      if (in.x1 - in.x0 >= 3 && in.y1 - in.y0 >= 3) interiors.push_back(in);
    }
  }
  const auto lc_at = [&](int c, int r) { return static_cast<LandCover>(s.lc.at(c, r)); };

  // Buildings: non-overlapping rectangles, 1 m apart, until the target area is reached.
  const double total_px = static_cast<double>(n) * n;
  if (!interiors.empty() && cfg.building_density > 0.0) {
    CounterRng rng(CounterRng::derive(cfg.seed, kBuildings));
    const int gap = to_px(1.0, gsd);
    double covered = 0.0;
    for (int attempt = 0; attempt < 200000 && covered < cfg.building_density * total_px; ++attempt) {
      const Interior& in = interiors[rng.below(interiors.size())];
      const int max_w = in.x1 - in.x0 - 2;
      const int max_h = in.y1 - in.y0 - 2;
      const int w = std::min(max_w, to_px(rng.uniform(cfg.building_min_side, cfg.building_max_side), gsd));
      const int h = std::min(max_h, to_px(rng.uniform(cfg.building_min_side, cfg.building_max_side), gsd));
      const double height = std::clamp(std::exp(cfg.building_log_mu + cfg.building_log_sigma * rng.normal()),
                                       cfg.building_min_height, cfg.building_max_height);
      const int roof = static_cast<int>(rng.below(4));
      const int tint = static_cast<int>(rng.below(41)) - 20;
      if (w < 2 || h < 2) continue;
      const int x0 = in.x0 + 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_w - w + 1)));
      const int y0 = in.y0 + 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_h - h + 1)));
      bool clear = true;
      for (int r = std::max(0, y0 - gap); r < std::min(n, y0 + h + gap) && clear; ++r) {
        for (int c = std::max(0, x0 - gap); c < std::min(n, x0 + w + gap); ++c) {
          if (lc_at(c, r) == LandCover::building) {
            clear = false;
            break;
          }
        }
      }
      if (!clear) continue;
      for (int r = y0; r < y0 + h; ++r) {
        for (int c = x0; c < x0 + w; ++c) {
          paint(c, r, LandCover::building, shade(kRoofs[roof], tint));
          s.truth.at(c, r) = static_cast<float>(height);
        }
      }
      covered += static_cast<double>(w) * h;
      ++s.n_buildings;
    }
  }

  // Trees: flat disks on open block ground; overlapping crowns keep the taller one.
  if (!interiors.empty() && cfg.tree_density > 0.0) {
    CounterRng rng(CounterRng::derive(cfg.seed, kTrees));
    double covered = 0.0;
    for (int attempt = 0; attempt < 200000 && covered < cfg.tree_density * total_px; ++attempt) {
      const Interior& in = interiors[rng.below(interiors.size())];
      const double radius = rng.uniform(cfg.tree_min_radius, cfg.tree_max_radius) / gsd;
      const double cx = in.x0 + rng.uniform() * (in.x1 - in.x0);
      const double cy = in.y0 + rng.uniform() * (in.y1 - in.y0);
      const double height = rng.uniform(cfg.tree_min_height, cfg.tree_max_height);
      const int tint = static_cast<int>(rng.below(31)) - 15;
      const int c0 = static_cast<int>(std::floor(cx - radius));
      const int c1 = static_cast<int>(std::ceil(cx + radius));
      const int r0 = static_cast<int>(std::floor(cy - radius));
      const int r1 = static_cast<int>(std::ceil(cy + radius));
      const auto inside = [&](int c, int r) {
        const double dx = c + 0.5 - cx;
        const double dy = r + 0.5 - cy;
        return dx * dx + dy * dy <= radius * radius;
      };
      bool clear = true;
      for (int r = r0; r <= r1 && clear; ++r) {
        for (int c = c0; c <= c1; ++c) {
          if (!inside(c, r)) continue;
          if (c < in.x0 || c >= in.x1 || r < in.y0 || r >= in.y1 || lc_at(c, r) == LandCover::building) {
            clear = false;
            break;
          }
        }
      }
      if (!clear) continue;
      for (int r = r0; r <= r1; ++r) {
        for (int c = c0; c <= c1; ++c) {
          if (!inside(c, r)) continue;
          if (lc_at(c, r) != LandCover::tree) {
            covered += 1.0;
          } else if (s.truth.at(c, r) >= height) {
            continue;
          }
          paint(c, r, LandCover::tree, shade(class_color(LandCover::tree), tint));
          s.truth.at(c, r) = static_cast<float>(height);
        }
      }
      ++s.n_trees;
    }
  }

  // Smooth terrain: three long-wavelength sinusoids.
  CounterRng terrain(CounterRng::derive(cfg.seed, kTerrain));
  const double extent = n * gsd;
  const double two_pi = 2.0 * std::numbers::pi;
  double phase[3], wavelength[3];
  for (int k = 0; k < 3; ++k) {
    phase[k] = terrain.uniform(0.0, two_pi);
    wavelength[k] = extent * terrain.uniform(1.5, 3.0);
  }
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const double x = (c + 0.5) * gsd;
      const double y = (r + 0.5) * gsd;
      const double z = 0.5 * std::sin(two_pi * x / wavelength[0] + phase[0]) +
                       0.3 * std::sin(two_pi * y / wavelength[1] + phase[1]) +
                       0.2 * std::sin(two_pi * (x + y) / (std::numbers::sqrt2 * wavelength[2]) + phase[2]);
      s.dtm.at(c, r) = static_cast<float>(cfg.terrain_base + cfg.terrain_amplitude * z);
    }
  }
  return s;
}

void TrackConfig::validate() const {
  if (n_tracks < 1) throw DomainError("n_tracks must be at least 1");
  if (!(along_spacing > 0.0)) throw DomainError("along_spacing must be positive");
  if (cross_spacing < 0.0) throw DomainError("cross_spacing must be non-negative");
  if (!(noise_sigma >= 0.0)) throw DomainError("noise_sigma must be non-negative");
  if (dropout < 0.0 || dropout >= 1.0) throw DomainError("dropout must lie in [0,1)");
  double total = 0.0;
  for (double p : conf_profile) {
    if (p < 0.0) throw DomainError("conf_profile entries must be non-negative");
    total += p;
  }
  if (!(total > 0.0)) throw DomainError("conf_profile must have positive mass");
}

namespace {

struct TrackLine {
  double px, py;  // point on the line
  double dx, dy;  // unit direction
  double s_lo, s_hi;
};

std::vector<TrackLine> track_lines(const RasterHeader& h, const TrackConfig& cfg) {
  const double az = cfg.azimuth * std::numbers::pi / 180.0;
  const double dx = std::sin(az);
  const double dy = std::cos(az);
  const double nx = std::cos(az);
  const double ny = -std::sin(az);
  const double cx = (h.min_x() + h.max_x()) / 2.0;
  const double cy = (h.min_y() + h.max_y()) / 2.0;
  // Width of the scene measured across the tracks.
  const double across = std::abs(nx) * (h.max_x() - h.min_x()) + std::abs(ny) * (h.max_y() - h.min_y());
  const double spacing = cfg.cross_spacing > 0.0 ? cfg.cross_spacing : across / cfg.n_tracks;

  std::vector<TrackLine> out;
  for (int k = 0; k < cfg.n_tracks; ++k) {
    const double o = (k - (cfg.n_tracks - 1) / 2.0) * spacing;
    TrackLine t{cx + o * nx, cy + o * ny, dx, dy, -std::numeric_limits<double>::infinity(),
                std::numeric_limits<double>::infinity()};
    const auto clip = [&](double p, double d, double lo, double hi) {
      if (std::abs(d) < 1e-12) {
        if (p < lo || p > hi) t.s_lo = 1.0, t.s_hi = 0.0;
        return;
      }
      double a = (lo - p) / d;
      double b = (hi - p) / d;
      if (a > b) std::swap(a, b);
      t.s_lo = std::max(t.s_lo, a);
      t.s_hi = std::min(t.s_hi, b);
    };
    clip(t.px, t.dx, h.min_x(), h.max_x());
    clip(t.py, t.dy, h.min_y(), h.max_y());
    out.push_back(t);
  }
  return out;
}

std::size_t samples_on(const TrackLine& t, double spacing) {
  if (!(t.s_hi > t.s_lo)) return 0;
  return static_cast<std::size_t>(std::ceil((t.s_hi - t.s_lo) / spacing));
}

}  // namespace

std::size_t expected_track_samples(const RasterHeader& extent, const TrackConfig& cfg) {
  cfg.validate();
  std::size_t total = 0;
  for (const TrackLine& t : track_lines(extent, cfg)) total += samples_on(t, cfg.along_spacing);
  return total;
}

std::vector<Photon> simulate_tracks(const HeightRaster& truth, const HeightRaster& dtm, const TrackConfig& cfg) {
  cfg.validate();
  require_same_geometry(truth.header, dtm.header, "dtm");
  double conf_total = 0.0;
  for (double p : cfg.conf_profile) conf_total += p;

  std::vector<Photon> photons;
  std::uint64_t counter = 0;
  bool crossed = false;
  const auto lines = track_lines(truth.header, cfg);
  for (std::size_t k = 0; k < lines.size(); ++k) {
    const TrackLine& t = lines[k];
    const std::size_t count = samples_on(t, cfg.along_spacing);
    crossed = crossed || count > 0;
    for (std::size_t j = 0; j < count; ++j) {
      const std::uint64_t index = counter++;
      CounterRng rng(CounterRng::derive(cfg.seed, index));
      const double u_drop = rng.uniform();
      const double u_conf = rng.uniform() * conf_total;
      const double noise = rng.normal();

      const double along = static_cast<double>(j) * cfg.along_spacing;
      const double s = t.s_lo + along;
      const double x = t.px + s * t.dx;
      const double y = t.py + s * t.dy;
      if (u_drop < cfg.dropout || !truth.header.contains(x, y)) continue;
      const auto pixel = truth.header.containing_pixel(x, y);
      if (!pixel || !truth.valid(pixel->first, pixel->second)) continue;
      const std::optional<double> ground = sample_bilinear(dtm, x, y);
      if (!ground) continue;
      const double h = truth.at(pixel->first, pixel->second);

      Photon p;
      p.id = static_cast<std::int64_t>(index) + 1;
      p.x = x;
      p.y = y;
      p.elev = *ground + h + cfg.noise_sigma * noise;
      double acc = 0.0;
      p.signal_conf = 4;
      for (int c = 0; c < 5; ++c) {
        acc += cfg.conf_profile[static_cast<std::size_t>(c)];
        if (u_conf < acc) {
          p.signal_conf = c;
          break;
        }
      }
      p.atl08_class = h < 0.5 ? AtlClass::ground : AtlClass::top_of_canopy;
      p.beam = static_cast<int>(k) + 1;
      p.t = along / 7000.0;
      photons.push_back(p);
    }
  }
  if (!crossed) throw DomainError("no simulated track crosses the scene");
  return photons;
}

void CorruptionConfig::validate() const {
  if (alpha == 0.0 || !std::isfinite(alpha)) throw DomainError("alpha must be finite and non-zero");
  if (!(noise_sigma >= 0.0)) throw DomainError("noise_sigma must be non-negative");
  if (noise_sigma > 0.0 && !(noise_correlation > 0.0)) throw DomainError("noise_correlation must be positive");
}

namespace {

std::vector<double> correlated_noise(int w, int h, double sigma_px, std::uint64_t key) {
  CounterRng rng(key);
  std::vector<double> white(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
  for (double& v : white) v = rng.normal();

  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma_px)));
  std::vector<double> taps(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int k = -radius; k <= radius; ++k) {
    taps[static_cast<std::size_t>(k + radius)] = std::exp(-(k * k) / (2.0 * sigma_px * sigma_px));
    sum += taps[static_cast<std::size_t>(k + radius)];
  }
  for (double& t : taps) t /= sum;

  const auto idx = [w](int c, int r) { return static_cast<std::size_t>(r) * static_cast<std::size_t>(w) + static_cast<std::size_t>(c); };
  std::vector<double> tmp(white.size());
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) acc += taps[static_cast<std::size_t>(k + radius)] * white[idx(std::clamp(c + k, 0, w - 1), r)];
      tmp[idx(c, r)] = acc;
    }
  }
  std::vector<double> out(white.size());
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) acc += taps[static_cast<std::size_t>(k + radius)] * tmp[idx(c, std::clamp(r + k, 0, h - 1))];
      out[idx(c, r)] = acc;
    }
  }
  double mean = 0.0;
  for (double v : out) mean += v;
  mean /= static_cast<double>(out.size());
  double var = 0.0;
  for (double v : out) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / static_cast<double>(out.size()));
  for (double& v : out) v = sd > 0.0 ? (v - mean) / sd : 0.0;
  return out;
}

}  // namespace

HeightRaster corrupt_prediction(const HeightRaster& truth, const LandCoverRaster& lc, const CorruptionConfig& cfg) {
  cfg.validate();
  require_same_geometry(truth.header, lc.header, "land-cover map");
  std::vector<double> noise;
  if (cfg.noise_sigma > 0.0) {
    noise = correlated_noise(truth.width(), truth.height(), cfg.noise_correlation / truth.header.gsd,
                             CounterRng::derive(cfg.seed, kNoise));
  }
  HeightRaster pred = truth;
  for (std::size_t i = 0; i < truth.values.size(); ++i) {
    if (truth.is_nodata(truth.values[i])) continue;
    double v = cfg.alpha * truth.values[i] + cfg.beta;
    const std::uint8_t cls = lc.values[i];
    if (!lc.is_nodata(cls) && cls < kLandCoverClasses) v += cfg.class_bias[cls];
    if (!noise.empty()) v += cfg.noise_sigma * noise[i];
    pred.values[i] = static_cast<float>(std::max(v, 0.0));
  }
  return pred;
}

void to_json(nlohmann::json& j, const SceneConfig& c) {
  j = {{"size", c.size},
       {"gsd", c.gsd},
       {"building_density", c.building_density},
       {"tree_density", c.tree_density},
       {"building_log_mu", c.building_log_mu},
       {"building_log_sigma", c.building_log_sigma},
       {"building_min_height", c.building_min_height},
       {"building_max_height", c.building_max_height},
       {"building_min_side", c.building_min_side},
       {"building_max_side", c.building_max_side},
       {"tree_min_height", c.tree_min_height},
       {"tree_max_height", c.tree_max_height},
       {"tree_min_radius", c.tree_min_radius},
       {"tree_max_radius", c.tree_max_radius},
       {"terrain_amplitude", c.terrain_amplitude},
       {"terrain_base", c.terrain_base},
       {"block_size", c.block_size},
       {"road_width", c.road_width},
       {"water_block_probability", c.water_block_probability},
       {"seed", c.seed},
       {"origin_x", c.origin_x},
       {"origin_y", c.origin_y},
       {"crs_code", c.crs_code}};
}

void from_json(const nlohmann::json& j, SceneConfig& c) {
  c.size = j.value("size", c.size);
  c.gsd = j.value("gsd", c.gsd);
  c.building_density = j.value("building_density", c.building_density);
  c.tree_density = j.value("tree_density", c.tree_density);
  c.building_log_mu = j.value("building_log_mu", c.building_log_mu);
  c.building_log_sigma = j.value("building_log_sigma", c.building_log_sigma);
  c.building_min_height = j.value("building_min_height", c.building_min_height);
  c.building_max_height = j.value("building_max_height", c.building_max_height);
  c.building_min_side = j.value("building_min_side", c.building_min_side);
  c.building_max_side = j.value("building_max_side", c.building_max_side);
  c.tree_min_height = j.value("tree_min_height", c.tree_min_height);
  c.tree_max_height = j.value("tree_max_height", c.tree_max_height);
  c.tree_min_radius = j.value("tree_min_radius", c.tree_min_radius);
  c.tree_max_radius = j.value("tree_max_radius", c.tree_max_radius);
  c.terrain_amplitude = j.value("terrain_amplitude", c.terrain_amplitude);
  c.terrain_base = j.value("terrain_base", c.terrain_base);
  c.block_size = j.value("block_size", c.block_size);
  c.road_width = j.value("road_width", c.road_width);
  c.water_block_probability = j.value("water_block_probability", c.water_block_probability);
  c.seed = j.value("seed", c.seed);
  c.origin_x = j.value("origin_x", c.origin_x);
  c.origin_y = j.value("origin_y", c.origin_y);
  c.crs_code = j.value("crs_code", c.crs_code);
}

void to_json(nlohmann::json& j, const TrackConfig& c) {
  j = {{"n_tracks", c.n_tracks},       {"azimuth", c.azimuth},         {"along_spacing", c.along_spacing},
       {"cross_spacing", c.cross_spacing}, {"footprint", c.footprint},   {"noise_sigma", c.noise_sigma},
       {"dropout", c.dropout},         {"conf_profile", c.conf_profile}, {"seed", c.seed}};
}

void from_json(const nlohmann::json& j, TrackConfig& c) {
  c.n_tracks = j.value("n_tracks", c.n_tracks);
  c.azimuth = j.value("azimuth", c.azimuth);
  c.along_spacing = j.value("along_spacing", c.along_spacing);
  c.cross_spacing = j.value("cross_spacing", c.cross_spacing);
  c.footprint = j.value("footprint", c.footprint);
  c.noise_sigma = j.value("noise_sigma", c.noise_sigma);
  c.dropout = j.value("dropout", c.dropout);
  c.conf_profile = j.value("conf_profile", c.conf_profile);
  c.seed = j.value("seed", c.seed);
}

void to_json(nlohmann::json& j, const CorruptionConfig& c) {
  j = {{"alpha", c.alpha},
       {"beta", c.beta},
       {"class_bias", c.class_bias},
       {"noise_sigma", c.noise_sigma},
       {"noise_correlation", c.noise_correlation},
       {"seed", c.seed}};
}

void from_json(const nlohmann::json& j, CorruptionConfig& c) {
  c.alpha = j.value("alpha", c.alpha);
  c.beta = j.value("beta", c.beta);
  c.class_bias = j.value("class_bias", c.class_bias);
  c.noise_sigma = j.value("noise_sigma", c.noise_sigma);
  c.noise_correlation = j.value("noise_correlation", c.noise_correlation);
  c.seed = j.value("seed", c.seed);
}

}  // namespace lidar_anchor
