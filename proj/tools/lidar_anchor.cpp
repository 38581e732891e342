// Command-line entry point: one subcommand per pipeline stage plus `pipeline`
// for the whole chain and `synth` for synthetic benchmark scenes.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "lidar_anchor/error.hpp"
#include "lidar_anchor/log.hpp"
#include "lidar_anchor/parallel.hpp"
#include "lidar_anchor/pipeline.hpp"
#include "lidar_anchor/raster_io.hpp"
#include "lidar_anchor/synth.hpp"

namespace fs = std::filesystem;
using namespace lidar_anchor;

namespace {

struct Flags {
  std::optional<std::string> config, pred, optical, landcover, dtm, photons, reference, mode, features, embeddings,
      out, clean_photons, model;
  std::optional<int> patch, stride, trees;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<double> footprint;
};

void add_flags(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config, "JSON config file");
  app->add_option("--pred", f.pred, "height prediction (or relative depth) raster");
  app->add_option("--optical", f.optical, "3-band optical raster");
  app->add_option("--landcover", f.landcover, "land-cover raster");
  app->add_option("--dtm", f.dtm, "terrain model raster");
  app->add_option("--photons", f.photons, "photon CSV");
  app->add_option("--reference", f.reference, "reference height raster");
  app->add_option("--mode", f.mode, "input mode")->check(CLI::IsMember({"metric", "relative"}));
  app->add_option("--features", f.features, "feature set")->check(CLI::IsMember({"hrf", "nrf"}));
  app->add_option("--embeddings", f.embeddings, "embedding grid raster");
  app->add_option("--patch", f.patch, "window size in pixels");
  app->add_option("--stride", f.stride, "sliding-window stride in pixels");
  app->add_option("--trees", f.trees, "number of trees");
  app->add_option("--seed", f.seed, "random seed");
  app->add_option("--threads", f.threads, "worker thread cap (0 = all cores)");
  app->add_option("--out", f.out, "output directory");
  app->add_option("--clean-photons", f.clean_photons, "clean photon CSV from `preprocess`");
  app->add_option("--model", f.model, "model file from `train`");
  app->add_option("--footprint", f.footprint, "sampling footprint diameter in meters");
}

PipelineConfig resolve(const Flags& f) {
  PipelineConfig cfg = f.config ? load_config(*f.config) : PipelineConfig{};
  if (f.pred) cfg.pred = *f.pred;
  if (f.optical) cfg.optical = *f.optical;
  if (f.landcover) cfg.landcover = *f.landcover;
  if (f.dtm) cfg.dtm = *f.dtm;
  if (f.photons) cfg.photons = *f.photons;
  if (f.reference) cfg.reference = *f.reference;
  if (f.mode) cfg.mode = input_mode_from_string(*f.mode);
  if (f.features) cfg.features = *f.features == "hrf" ? FeatureSchema::hrf27 : FeatureSchema::nrf;
  if (f.embeddings) cfg.embeddings = *f.embeddings;
  if (f.out) cfg.out = *f.out;
  if (f.patch) cfg.patch = *f.patch;
  if (f.stride) cfg.stride = *f.stride;
  if (f.trees) cfg.forest.n_trees = *f.trees;
  if (f.seed) cfg.seed = *f.seed;
  if (f.threads) cfg.threads = *f.threads;
  if (f.footprint) {
    cfg.footprint = *f.footprint;
    cfg.affine.footprint = *f.footprint;
  }
  set_max_threads(cfg.threads);
  return cfg;
}

fs::path need(const std::optional<std::string>& v, const fs::path& fallback, const char* flag) {
  if (v) return *v;
  if (!fallback.empty()) return fallback;
  throw DomainError(std::string("missing required option ") + flag);
}

int run_synth(const Flags& f) {
  SceneConfig scene;
  TrackConfig tracks;
  CorruptionConfig corruption;
  if (f.config) {
    std::ifstream in(*f.config);
    if (!in) throw IoError("cannot open config " + *f.config);
    const nlohmann::json j = nlohmann::json::parse(in);
    if (j.contains("scene")) scene = j.at("scene").get<SceneConfig>();
    if (j.contains("tracks")) tracks = j.at("tracks").get<TrackConfig>();
    if (j.contains("corruption")) corruption = j.at("corruption").get<CorruptionConfig>();
  }
  if (f.seed) scene.seed = tracks.seed = corruption.seed = *f.seed;
  const fs::path out = f.out ? fs::path(*f.out) : fs::path("synth");

  const Scene s = generate_scene(scene);
  const auto photons = simulate_tracks(s.truth, s.dtm, tracks);
  const HeightRaster pred = corrupt_prediction(s.truth, s.lc, corruption);
  save_raster(s.truth, out / "truth.bin");
  save_raster(s.optical, out / "optical.bin");
  save_raster(s.lc, out / "landcover.bin");
  save_raster(s.dtm, out / "dtm.bin");
  save_raster(pred, out / "pred.bin");
  save_photons(photons, out / "photons.csv");

  nlohmann::ordered_json manifest;
  manifest["scene"] = nlohmann::json(scene);
  manifest["tracks"] = nlohmann::json(tracks);
  manifest["corruption"] = nlohmann::json(corruption);
  manifest["n_buildings"] = s.n_buildings;
  manifest["n_trees"] = s.n_trees;
  manifest["n_photons"] = photons.size();
  manifest["files"] = {"truth.bin", "optical.bin", "landcover.bin", "dtm.bin", "pred.bin", "photons.csv"};
  write_json(manifest, out / "scene_manifest.json");
  spdlog::info("synth: {}x{} scene, {} buildings, {} trees, {} photons -> {}", scene.size, scene.size,
               s.n_buildings, s.n_trees, photons.size(), out.string());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  init_logging();
  CLI::App app{"Corrects monocular height maps with sparse spaceborne LiDAR photons"};
  app.require_subcommand(1);

  Flags flags;
  const auto sub = [&](const char* name, const char* help) {
    CLI::App* s = app.add_subcommand(name, help);
    add_flags(s, flags);
    return s;
  };
  CLI::App* preprocess = sub("preprocess", "filter, normalize and cluster photons into clean supervision points");
  CLI::App* fit_scale = sub("fit-scale", "fit height = a * depth + b and rescale a relative depth map");
  CLI::App* train = sub("train", "train the residual forest");
  CLI::App* correct = sub("correct", "infer the residual field and write the corrected height map");
  CLI::App* evaluate = sub("evaluate", "compare a height map with a reference");
  CLI::App* synth = sub("synth", "generate a synthetic scene with simulated tracks");
  CLI::App* pipeline = sub("pipeline", "run every stage in order");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) return run_synth(flags);
    const PipelineConfig cfg = resolve(flags);
    const fs::path out = cfg.out;
    if (preprocess->parsed()) {
      run_preprocess_stage(need(flags.photons, cfg.photons, "--photons"), need(flags.dtm, cfg.dtm, "--dtm"),
                           need(flags.landcover, cfg.landcover, "--landcover"), cfg.preprocess, out);
    } else if (fit_scale->parsed()) {
      run_fit_scale_stage(need(flags.pred, cfg.pred, "--pred"),
                          need(flags.clean_photons, out / "clean_photons.csv", "--clean-photons"), cfg.affine, out);
    } else if (train->parsed()) {
      run_train_stage(cfg, need(flags.pred, cfg.pred, "--pred"),
                      need(flags.clean_photons, out / "clean_photons.csv", "--clean-photons"), out);
    } else if (correct->parsed()) {
      run_correct_stage(cfg, need(flags.pred, cfg.pred, "--pred"), need(flags.model, out / "model.json", "--model"),
                        out);
    } else if (evaluate->parsed()) {
      run_evaluate_stage(need(flags.pred, cfg.pred, "--pred"), need(flags.reference, cfg.reference, "--reference"),
                         cfg.landcover, cfg.metrics, out);
    } else if (pipeline->parsed()) {
      const auto summary = run_pipeline(cfg);
      if (summary.contains("metrics") && !summary["metrics"].is_null()) {
        spdlog::info("pipeline: mae {} -> {}", summary["metrics"]["baseline"]["mae"].get<double>(),
                     summary["metrics"]["corrected"]["mae"].get<double>());
      }
    }
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
