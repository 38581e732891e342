#include "lidar_anchor/pipeline.hpp"

#include <fstream>

#include <spdlog/spdlog.h>

#include "lidar_anchor/error.hpp"
#include "lidar_anchor/parallel.hpp"
#include "lidar_anchor/raster_io.hpp"
#include "lidar_anchor/residual.hpp"

namespace lidar_anchor {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

std::string to_string(InputMode m) { return m == InputMode::metric ? "metric" : "relative"; }

InputMode input_mode_from_string(const std::string& s) {
  if (s == "metric" || s == "metric_height") return InputMode::metric;
  if (s == "relative" || s == "relative_depth") return InputMode::relative;
  throw DomainError("unknown input mode '" + s + "' (expected metric or relative)");
}

namespace {

FeatureSchema features_from_flag(const std::string& s) {
  if (s == "hrf" || s == "hrf27") return FeatureSchema::hrf27;
  if (s == "nrf") return FeatureSchema::nrf;
  throw DomainError("unknown feature set '" + s + "' (expected hrf or nrf)");
}

void require_file(const fs::path& p, const char* what) {
  if (p.empty()) throw DomainError(std::string("missing required input: ") + what);
  fs::path probe = p;
  if (!fs::exists(probe)) {
    // Rasters may be named by stem, .bin or .json.
    const fs::path stem = raster_stem(p);
    if (!fs::exists(fs::path(stem.string() + ".json"))) {
      throw DomainError(std::string(what) + " not found: " + p.string());
    }
  }
}

}  // namespace

void PipelineConfig::validate() const {
  require_file(pred, "--pred");
  require_file(dtm, "--dtm");
  require_file(photons, "--photons");
  require_file(landcover, "--landcover");
  if (features == FeatureSchema::hrf27) {
    require_file(optical, "--optical");
  } else {
    require_file(embeddings, "--embeddings");
  }
  if (!reference.empty()) require_file(reference, "--reference");
  if (patch < 3) throw DomainError("--patch must be at least 3");
  if (stride < 1) throw DomainError("--stride must be at least 1");
  if (forest.n_trees < 1) throw DomainError("--trees must be at least 1");
  if (footprint < 0.0) throw DomainError("footprint must be non-negative");
}

void apply_config_json(PipelineConfig& cfg, const nlohmann::json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw DomainError("config must be a JSON object");
  const auto path = [&](const char* key, fs::path& target) {
    if (!j.contains(key) || j.at(key).is_null()) return;
    fs::path p = j.at(key).get<std::string>();
    target = p.is_relative() ? base_dir / p : p;
  };
  try {
    if (j.contains("mode")) cfg.mode = input_mode_from_string(j.at("mode").get<std::string>());
    path("pred", cfg.pred);
    path("optical", cfg.optical);
    path("landcover", cfg.landcover);
    path("dtm", cfg.dtm);
    path("photons", cfg.photons);
    path("reference", cfg.reference);
    path("embeddings", cfg.embeddings);
    path("out", cfg.out);
    if (j.contains("features")) cfg.features = features_from_flag(j.at("features").get<std::string>());
    cfg.patch = j.value("patch", cfg.patch);
    cfg.stride = j.value("stride", cfg.stride);
    cfg.footprint = j.value("footprint", cfg.footprint);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.threads = j.value("threads", cfg.threads);
    cfg.forest.n_trees = j.value("trees", cfg.forest.n_trees);
    if (j.contains("forest")) {
      const auto& f = j.at("forest");
      cfg.forest.n_trees = f.value("n_trees", cfg.forest.n_trees);
      cfg.forest.max_depth = f.value("max_depth", cfg.forest.max_depth);
      cfg.forest.min_samples_leaf = f.value("min_samples_leaf", cfg.forest.min_samples_leaf);
      cfg.forest.max_features = f.value("max_features", cfg.forest.max_features);
      cfg.forest.bootstrap = f.value("bootstrap", cfg.forest.bootstrap);
    }
    if (j.contains("preprocess")) {
      const auto& p = j.at("preprocess");
      PreprocessParams& pp = cfg.preprocess;
      pp.idw.power = p.value("idw_power", pp.idw.power);
      pp.idw.radius = p.value("idw_radius", pp.idw.radius);
      pp.idw.k_max = p.value("idw_k_max", pp.idw.k_max);
      pp.dtm_tau = p.value("dtm_tau", pp.dtm_tau);
      pp.normalize.discard_below = p.value("discard_below", pp.normalize.discard_below);
      pp.bounds.tree_min = p.value("tree_min", pp.bounds.tree_min);
      pp.bounds.tree_max = p.value("tree_max", pp.bounds.tree_max);
      pp.bounds.building_min = p.value("building_min", pp.bounds.building_min);
      pp.bounds.building_max = p.value("building_max", pp.bounds.building_max);
      pp.cluster.eps = p.value("eps", pp.cluster.eps);
      pp.cluster.min_pts = p.value("min_pts", pp.cluster.min_pts);
      pp.cluster.height_weight = p.value("height_weight", pp.cluster.height_weight);
      pp.cell = p.value("cell", pp.cell);
    }
    if (j.contains("affine")) {
      const auto& a = j.at("affine");
      cfg.affine.footprint = a.value("footprint", cfg.affine.footprint);
      cfg.affine.robust = a.value("robust", cfg.affine.robust);
      cfg.affine.huber_threshold = a.value("huber_threshold", cfg.affine.huber_threshold);
      cfg.affine.huber_iterations = a.value("huber_iterations", cfg.affine.huber_iterations);
    }
    if (j.contains("metrics")) {
      const auto& m = j.at("metrics");
      cfg.metrics.T = m.value("T", cfg.metrics.T);
      cfg.metrics.eta = m.value("eta", cfg.metrics.eta);
    }
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("invalid config: ") + e.what());
  }
}

PipelineConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DomainError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  PipelineConfig cfg;
  apply_config_json(cfg, j, path.parent_path());
  return cfg;
}

ojson config_to_json(const PipelineConfig& c) {
  ojson j;
  j["mode"] = to_string(c.mode);
  j["pred"] = c.pred.generic_string();
  j["optical"] = c.optical.generic_string();
  j["landcover"] = c.landcover.generic_string();
  j["dtm"] = c.dtm.generic_string();
  j["photons"] = c.photons.generic_string();
  j["reference"] = c.reference.generic_string();
  j["embeddings"] = c.embeddings.generic_string();
  j["features"] = c.features == FeatureSchema::hrf27 ? "hrf" : "nrf";
  j["patch"] = c.patch;
  j["stride"] = c.stride;
  j["footprint"] = c.footprint;
  j["seed"] = c.seed;
  j["forest"] = {{"n_trees", c.forest.n_trees},
                 {"max_depth", c.forest.max_depth},
                 {"min_samples_leaf", c.forest.min_samples_leaf},
                 {"max_features", c.forest.max_features},
                 {"bootstrap", c.forest.bootstrap}};
  const PreprocessParams& p = c.preprocess;
  j["preprocess"] = {{"idw_power", p.idw.power},
                     {"idw_radius", p.idw.radius},
                     {"idw_k_max", p.idw.k_max},
                     {"dtm_tau", p.dtm_tau},
                     {"discard_below", p.normalize.discard_below},
                     {"tree_min", p.bounds.tree_min},
                     {"tree_max", p.bounds.tree_max},
                     {"building_min", p.bounds.building_min},
                     {"building_max", p.bounds.building_max},
                     {"eps", p.cluster.eps},
                     {"min_pts", p.cluster.min_pts},
                     {"height_weight", p.cluster.height_weight},
                     {"cell", p.cell}};
  j["affine"] = {{"footprint", c.affine.footprint},
                 {"robust", c.affine.robust},
                 {"huber_threshold", c.affine.huber_threshold},
                 {"huber_iterations", c.affine.huber_iterations}};
  j["metrics"] = {{"T", c.metrics.T}, {"eta", c.metrics.eta}};
  return j;
}

void write_json(const ojson& j, const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << "\n";
  if (!out) throw IoError("short write to " + path.string());
}

ojson run_preprocess_stage(const fs::path& photons_path, const fs::path& dtm_path, const fs::path& lc_path,
                           const PreprocessParams& params, const fs::path& out) {
  const auto photons = load_photons(photons_path);
  const HeightRaster dtm = load_height(dtm_path);
  const LandCoverRaster lc = load_landcover(lc_path);
  const PreprocessResult r = preprocess_photons(photons, dtm, lc, params);
  save_clean_photons(r.clean, out / "clean_photons.csv");

  std::size_t objects = 0;
  for (const CleanPhoton& p : r.clean) objects += p.kind == PhotonKind::object;
  ojson rep;
  rep["counts"] = {{"input", r.counts.input},           {"in_extent", r.counts.in_extent},
                   {"confidence", r.counts.confidence}, {"normalized", r.counts.normalized},
                   {"landcover", r.counts.landcover},   {"clean", r.counts.clean}};
  rep["ground_source"] = {{"idw", r.ground_idw},
                          {"dtm_fallback", r.ground_dtm_fallback},
                          {"dtm_override", r.ground_dtm_override}};
  rep["clusters"] = r.clusters;
  rep["noise"] = r.noise;
  rep["clean_ground"] = r.clean.size() - objects;
  rep["clean_object"] = objects;
  write_json(rep, out / "preprocess_report.json");
  spdlog::info("preprocess: {} photons in, {} clean ({} object centroids)", r.counts.input, r.clean.size(), objects);
  return rep;
}

ojson run_fit_scale_stage(const fs::path& depth_path, const fs::path& clean_path, const AffineFitOptions& options,
                          const fs::path& out) {
  const HeightRaster depth = load_height(depth_path);
  const auto clean = load_clean_photons(clean_path);
  const AffineFit fit = fit_affine(depth, clean, options);
  save_raster(apply_affine(depth, fit), out / "pred_metric.bin");
  ojson rep;
  rep["a"] = fit.a;
  rep["b"] = fit.b;
  rep["n_points"] = fit.n_points;
  rep["rmse"] = fit.rmse;
  rep["footprint"] = options.footprint;
  rep["robust"] = options.robust;
  write_json(rep, out / "affine.json");
  spdlog::info("fit-scale: a={} b={} over {} points (rmse {})", fit.a, fit.b, fit.n_points, fit.rmse);
  return rep;
}

namespace {

// Owns the rasters a FeatureContext points into.
struct FeatureInputs {
  HeightRaster pred;
  OpticalRaster optical;
  LandCoverRaster lc;
  EmbeddingGrid embeddings;

  FeatureInputs(const PipelineConfig& cfg, const fs::path& pred_path) : pred(load_height(pred_path)) {
    if (cfg.features == FeatureSchema::hrf27) {
      if (cfg.optical.empty() || cfg.landcover.empty()) {
        throw DomainError("hrf features need --optical and --landcover");
      }
      optical = load_optical(cfg.optical);
      lc = load_landcover(cfg.landcover);
    } else {
      if (cfg.embeddings.empty()) throw DomainError("nrf features need --embeddings");
      embeddings = load_embeddings(cfg.embeddings);
    }
  }

  FeatureContext context(const PipelineConfig& cfg) const {
    return cfg.features == FeatureSchema::hrf27 ? FeatureContext::hrf(pred, optical, lc, cfg.patch)
                                                 : FeatureContext::nrf(pred, embeddings, cfg.patch);
  }
};

}  // namespace

ojson run_train_stage(const PipelineConfig& cfg, const fs::path& pred_path, const fs::path& clean_path,
                      const fs::path& out) {
  const FeatureInputs inputs(cfg, pred_path);
  const FeatureContext ctx = inputs.context(cfg);
  const auto clean = load_clean_photons(clean_path);
  const TrainingSet set = build_training_set(ctx, clean, cfg.footprint);
  save_features_csv(set, out / "features.csv");

  ForestParams params = cfg.forest;
  params.seed = cfg.seed;
  const RandomForest forest = train_forest(set.samples, params);
  save_model(forest, out / "model.json");

  const FeatureImportance imp = feature_importance(forest);
  const auto names = feature_names(forest.schema, forest.n_features);
  {
    std::ofstream csv(out / "importance.csv", std::ios::binary | std::ios::trunc);
    if (!csv) throw IoError("cannot write " + (out / "importance.csv").string());
    csv << "feature,importance,group\n";
    for (std::size_t i = 0; i < names.size(); ++i) {
      const char* group = forest.schema == FeatureSchema::hrf27 ? hrf_feature_group(static_cast<int>(i)) : "embedding";
      csv << names[i] << ',' << format_double(imp.weights[i]) << ',' << group << '\n';
    }
  }

  ojson rep;
  rep["schema"] = to_string(forest.schema);
  rep["n_features"] = forest.n_features;
  rep["n_samples"] = set.samples.size();
  rep["skipped"] = set.skipped_nodata + set.skipped_outside;
  rep["skipped_nodata"] = set.skipped_nodata;
  rep["skipped_outside"] = set.skipped_outside;
  rep["n_trees"] = params.n_trees;
  rep["seed"] = params.seed;
  rep["oob_mae"] = forest.oob_mae ? ojson(*forest.oob_mae) : ojson(nullptr);
  rep["importance_degenerate"] = imp.degenerate;
  if (forest.schema == FeatureSchema::hrf27) {
    ojson groups = ojson::object();
    for (const char* g : {"prediction_stats", "gradient", "optical", "land_cover"}) groups[g] = 0.0;
    for (int i = 0; i < forest.n_features; ++i) {
      groups[hrf_feature_group(i)] = groups[hrf_feature_group(i)].get<double>() + imp.weights[static_cast<std::size_t>(i)];
    }
    rep["group_importance"] = groups;
  }
  write_json(rep, out / "train_report.json");
  spdlog::info("train: {} samples, {} trees, oob mae {}", set.samples.size(), params.n_trees,
               forest.oob_mae ? format_double(*forest.oob_mae) : std::string("n/a"));
  return rep;
}

ojson run_correct_stage(const PipelineConfig& cfg, const fs::path& pred_path, const fs::path& model_path,
                        const fs::path& out) {
  const RandomForest model = load_model(model_path);
  PipelineConfig effective = cfg;
  effective.features = model.schema;
  const FeatureInputs inputs(effective, pred_path);
  const FeatureContext ctx = inputs.context(effective);
  const ResidualField field = infer_residual_field(ctx, model, cfg.stride);
  const HeightRaster corrected = apply_correction(inputs.pred, field);
  save_raster(field.to_raster(), out / "residual.bin");
  save_raster(corrected, out / "corrected.bin");

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double sum = 0.0;
  std::size_t covered = 0;
  for (std::size_t i = 0; i < field.values.size(); ++i) {
    if (field.coverage[i] == 0) continue;
    lo = std::min(lo, field.values[i]);
    hi = std::max(hi, field.values[i]);
    sum += field.values[i];
    ++covered;
  }
  ojson rep;
  rep["patch"] = cfg.patch;
  rep["stride"] = cfg.stride;
  rep["covered_pixels"] = covered;
  rep["residual_mean"] = covered ? ojson(sum / static_cast<double>(covered)) : ojson(nullptr);
  rep["residual_min"] = covered ? ojson(lo) : ojson(nullptr);
  rep["residual_max"] = covered ? ojson(hi) : ojson(nullptr);
  spdlog::info("correct: residual field over {} pixels", covered);
  return rep;
}

ojson run_evaluate_stage(const fs::path& pred_path, const fs::path& ref_path, const fs::path& lc_path,
                         const MetricsParams& params, const fs::path& out, const std::string& name) {
  const HeightRaster pred = load_height(pred_path);
  const HeightRaster ref = load_height(ref_path);
  const MetricsReport report = evaluate(pred, ref, params);
  const ojson j = ojson::parse(metrics_to_json(report));
  write_json(j, out / (name + ".json"));
  if (!lc_path.empty()) {
    const LandCoverRaster lc = load_landcover(lc_path);
    save_strata_csv(stratify_by_landcover(pred, ref, lc), out / (name + "_by_class.csv"));
  }
  spdlog::info("evaluate ({}): mae {} rmse {} f1 {}", name, report.mae, report.rmse, report.f1.f1);
  return j;
}

namespace {

template <typename Fn>
auto stage(const char* name, Fn&& fn) {
  spdlog::debug("stage {} starting", name);
  try {
    return fn();
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

}  // namespace

ojson run_pipeline(const PipelineConfig& cfg) {
  cfg.validate();
  set_max_threads(cfg.threads);
  fs::create_directories(cfg.out);

  ojson summary;
  summary["seed"] = cfg.seed;
  summary["config"] = config_to_json(cfg);

  summary["preprocess"] = stage("preprocess", [&] {
    return run_preprocess_stage(cfg.photons, cfg.dtm, cfg.landcover, cfg.preprocess, cfg.out);
  });
  const fs::path clean = cfg.out / "clean_photons.csv";

  fs::path metric_pred = cfg.pred;
  if (cfg.mode == InputMode::relative) {
    summary["affine"] = stage("fit-scale", [&] { return run_fit_scale_stage(cfg.pred, clean, cfg.affine, cfg.out); });
    metric_pred = cfg.out / "pred_metric.bin";
  } else {
    summary["affine"] = nullptr;
  }

  summary["train"] = stage("train", [&] { return run_train_stage(cfg, metric_pred, clean, cfg.out); });
  summary["correct"] = stage("correct", [&] { return run_correct_stage(cfg, metric_pred, cfg.out / "model.json", cfg.out); });

  if (!cfg.reference.empty()) {
    summary["metrics"] = stage("evaluate", [&] {
      ojson m;
      m["baseline"] = run_evaluate_stage(metric_pred, cfg.reference, cfg.landcover, cfg.metrics, cfg.out,
                                         "baseline_metrics");
      m["corrected"] = run_evaluate_stage(cfg.out / "corrected.bin", cfg.reference, cfg.landcover, cfg.metrics,
                                          cfg.out, "metrics");
      return m;
    });
  } else {
    summary["metrics"] = nullptr;
  }
  write_json(summary, cfg.out / "summary.json");
  return summary;
}

}  // namespace lidar_anchor
