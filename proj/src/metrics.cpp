#include "lidar_anchor/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "lidar_anchor/error.hpp"
#include "lidar_anchor/kernels.hpp"
#include "lidar_anchor/parallel.hpp"
#include "lidar_anchor/photon.hpp"

namespace lidar_anchor {

namespace {

std::vector<std::uint8_t> joint_mask(const HeightRaster& pred, const HeightRaster& ref) {
  require_same_geometry(pred.header, ref.header, "metrics");
  std::vector<std::uint8_t> mask(pred.header.pixel_count());
  for (std::size_t i = 0; i < mask.size(); ++i) {
    mask[i] = !pred.is_nodata(pred.values[i]) && !ref.is_nodata(ref.values[i]);
  }
  return mask;
}

kernels::DiffSums diff_sums(const HeightRaster& pred, const HeightRaster& ref) {
  const auto mask = joint_mask(pred, ref);
  const kernels::DiffSums s =
      kernels::active().diff_sums(pred.values.data(), ref.values.data(), mask.data(), mask.size());
  if (s.count == 0) throw DomainError("metrics: no pixel is valid in both rasters");
  return s;
}

}  // namespace

double mae(const HeightRaster& pred, const HeightRaster& ref) {
  const auto s = diff_sums(pred, ref);
  return s.abs_sum / static_cast<double>(s.count);
}

double rmse(const HeightRaster& pred, const HeightRaster& ref) {
  const auto s = diff_sums(pred, ref);
  return std::sqrt(s.sq_sum / static_cast<double>(s.count));
}

double ssim_dynamic_range(const HeightRaster& ref, const SsimParams& params) {
  if (params.dynamic_range) return *params.dynamic_range;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (float v : ref.values) {
    if (ref.is_nodata(v)) continue;
    lo = std::min(lo, static_cast<double>(v));
    hi = std::max(hi, static_cast<double>(v));
  }
  if (!(hi >= lo)) return 1.0;
  return std::max(hi - lo, 1.0);
}

double ssim(const HeightRaster& pred, const HeightRaster& ref, const SsimParams& params) {
  const auto mask = joint_mask(pred, ref);
  const int win = params.window;
  if (win < 1 || win % 2 == 0) throw DomainError("ssim: window must be a positive odd size");
  const int w = pred.width();
  const int h = pred.height();
  if (w < win || h < win) throw DomainError("ssim: raster smaller than the window");

  std::vector<double> taps(static_cast<std::size_t>(win));
  double tap_sum = 0.0;
  for (int k = 0; k < win; ++k) {
    const double d = k - win / 2;
    taps[static_cast<std::size_t>(k)] = std::exp(-d * d / (2.0 * params.sigma * params.sigma));
    tap_sum += taps[static_cast<std::size_t>(k)];
  }
  for (double& t : taps) t /= tap_sum;

  const double L = ssim_dynamic_range(ref, params);
  const double c1 = (params.k1 * L) * (params.k1 * L);
  const double c2 = (params.k2 * L) * (params.k2 * L);

  const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  std::vector<double> maps[5];
  for (auto& m : maps) m.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = mask[i] ? pred.values[i] : 0.0;
    const double y = mask[i] ? ref.values[i] : 0.0;
    maps[0][i] = x;
    maps[1][i] = y;
    maps[2][i] = x * x;
    maps[3][i] = y * y;
    maps[4][i] = x * y;
  }

  // Integral image of invalid pixels to exclude windows touching nodata.
  std::vector<std::size_t> bad(static_cast<std::size_t>(w + 1) * static_cast<std::size_t>(h + 1), 0);
  const auto bad_at = [&](int c, int r) -> std::size_t& {
    return bad[static_cast<std::size_t>(r) * static_cast<std::size_t>(w + 1) + static_cast<std::size_t>(c)];
  };
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      bad_at(c + 1, r + 1) = bad_at(c, r + 1) + bad_at(c + 1, r) - bad_at(c, r) +
                             (mask[static_cast<std::size_t>(r) * static_cast<std::size_t>(w) + static_cast<std::size_t>(c)] ? 0 : 1);
    }
  }

  const kernels::KernelTable& k = kernels::active();
  const int wo = w - win + 1;
  const int ho = h - win + 1;
  std::vector<double> horiz[5];
  for (int m = 0; m < 5; ++m) {
    horiz[m].resize(static_cast<std::size_t>(wo) * static_cast<std::size_t>(h));
    for (int r = 0; r < h; ++r) {
      k.convolve_row(maps[m].data() + static_cast<std::size_t>(r) * static_cast<std::size_t>(w), taps.data(),
                     taps.size(), horiz[m].data() + static_cast<std::size_t>(r) * static_cast<std::size_t>(wo),
                     static_cast<std::size_t>(wo));
    }
  }

  struct RowSum {
    double sum = 0.0;
    std::size_t count = 0;
  };
  std::vector<RowSum> rows(static_cast<std::size_t>(ho));
  parallel_for(rows.size(), [&](std::size_t ri) {
    const int r = static_cast<int>(ri);
    std::vector<double> stat[5];
    std::vector<const double*> ptrs(static_cast<std::size_t>(win));
    for (int m = 0; m < 5; ++m) {
      stat[m].resize(static_cast<std::size_t>(wo));
      for (int t = 0; t < win; ++t) {
        ptrs[static_cast<std::size_t>(t)] =
            horiz[m].data() + static_cast<std::size_t>(r + t) * static_cast<std::size_t>(wo);
      }
      k.convolve_cols(ptrs.data(), taps.data(), taps.size(), stat[m].data(), static_cast<std::size_t>(wo));
    }
    RowSum acc;
    for (int c = 0; c < wo; ++c) {
      const std::size_t invalid = bad_at(c + win, r + win) - bad_at(c, r + win) - bad_at(c + win, r) + bad_at(c, r);
      if (invalid != 0) continue;
      const auto i = static_cast<std::size_t>(c);
      const double mx = stat[0][i];
      const double my = stat[1][i];
      const double vx = stat[2][i] - mx * mx;
      const double vy = stat[3][i] - my * my;
      const double cxy = stat[4][i] - mx * my;
      acc.sum += ((2.0 * mx * my + c1) * (2.0 * cxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
      ++acc.count;
    }
    rows[ri] = acc;
  });

  double sum = 0.0;
  std::size_t count = 0;
  for (const RowSum& r : rows) {
    sum += r.sum;
    count += r.count;
  }
  if (count == 0) throw DomainError("ssim: no window free of nodata");
  return sum / static_cast<double>(count);
}

F1Result f1_he(const HeightRaster& pred, const HeightRaster& ref, double T, double eta) {
  if (!(T > 0.0)) throw DomainError("f1_he: T must be positive");
  if (!(eta > 1.0)) throw DomainError("f1_he: eta must exceed 1");
  const auto mask = joint_mask(pred, ref);
  F1Result r;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    const double p = pred.values[i];
    const double y = ref.values[i];
    const bool p_pos = p > T;
    const bool y_pos = y > T;
    if (p_pos && y_pos) {
      const double pp = std::max(p, kHeightRatioFloor);
      const double yy = std::max(y, kHeightRatioFloor);
      if (std::max(pp / yy, yy / pp) < eta) ++r.tp;
    } else if (p_pos) {
      ++r.fp;
    } else if (y_pos) {
      ++r.fn;
    }
  }
  std::size_t predicted = 0;
  std::size_t actual = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    predicted += pred.values[i] > T;
    actual += ref.values[i] > T;
  }
  if (r.tp + r.fp == 0) {
    r.precision_undefined = predicted == 0;
  } else {
    r.precision = static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fp);
  }
  if (r.tp + r.fn == 0) {
    r.recall_undefined = actual == 0;
  } else {
    r.recall = static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fn);
  }
  if (r.precision + r.recall > 0.0) r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

MetricsReport evaluate(const HeightRaster& pred, const HeightRaster& ref, const MetricsParams& params) {
  MetricsReport rep;
  const auto s = diff_sums(pred, ref);
  rep.n_valid = s.count;
  rep.mae = s.abs_sum / static_cast<double>(s.count);
  rep.rmse = std::sqrt(s.sq_sum / static_cast<double>(s.count));
  rep.f1 = f1_he(pred, ref, params.T, params.eta);
  rep.T = params.T;
  rep.eta = params.eta;
  rep.ssim_window = params.ssim.window;
  rep.L = ssim_dynamic_range(ref, params.ssim);
  try {
    rep.ssim = ssim(pred, ref, params.ssim);
  } catch (const DomainError&) {
    rep.ssim.reset();
  }
  return rep;
}

std::string metrics_to_json(const MetricsReport& r) {
  nlohmann::ordered_json j;
  j["mae"] = r.mae;
  j["rmse"] = r.rmse;
  j["ssim"] = r.ssim ? nlohmann::ordered_json(*r.ssim) : nlohmann::ordered_json(nullptr);
  j["precision"] = r.f1.precision;
  j["recall"] = r.f1.recall;
  j["f1_he"] = r.f1.f1;
  j["tp"] = r.f1.tp;
  j["fp"] = r.f1.fp;
  j["fn"] = r.f1.fn;
  j["precision_undefined"] = r.f1.precision_undefined;
  j["recall_undefined"] = r.f1.recall_undefined;
  j["n_valid"] = r.n_valid;
  j["params"] = {{"T", r.T}, {"eta", r.eta}, {"ssim_window", r.ssim_window}, {"L", r.L}};
  return j.dump(2) + "\n";
}

std::vector<ClassMetrics> stratify_by_landcover(const HeightRaster& pred, const HeightRaster& ref,
                                                const LandCoverRaster& lc) {
  const auto mask = joint_mask(pred, ref);
  require_same_geometry(pred.header, lc.header, "land-cover map");
  struct Acc {
    std::size_t n = 0;
    double abs = 0.0, sq = 0.0, sum = 0.0;
  };
  Acc acc[kLandCoverClasses];
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i] || lc.is_nodata(lc.values[i]) || lc.values[i] >= kLandCoverClasses) continue;
    const double d = static_cast<double>(pred.values[i]) - static_cast<double>(ref.values[i]);
    Acc& a = acc[lc.values[i]];
    ++a.n;
    a.abs += std::abs(d);
    a.sq += d * d;
    a.sum += d;
  }
  std::vector<ClassMetrics> out;
  for (int c = 0; c < kLandCoverClasses; ++c) {
    const Acc& a = acc[c];
    if (a.n == 0) continue;
    const double n = static_cast<double>(a.n);
    out.push_back({c, a.n, a.abs / n, std::sqrt(a.sq / n), a.sum / n});
  }
  return out;
}

void save_strata_csv(const std::vector<ClassMetrics>& strata, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "lc_class,name,n,mae,rmse,bias\n";
  for (const ClassMetrics& m : strata) {
    out << m.lc_class << ',' << land_cover_name(m.lc_class) << ',' << m.n << ',' << format_double(m.mae) << ','
        << format_double(m.rmse) << ',' << format_double(m.bias) << '\n';
  }
  if (!out) throw IoError("short write to " + path.string());
}

}  // namespace lidar_anchor
