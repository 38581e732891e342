#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "lidar_anchor/features.hpp"
#include "lidar_anchor/forest.hpp"
#include "lidar_anchor/metrics.hpp"
#include "lidar_anchor/photon_pipeline.hpp"
#include "lidar_anchor/scale_calibration.hpp"

namespace lidar_anchor {

enum class InputMode { metric, relative };

std::string to_string(InputMode m);
InputMode input_mode_from_string(const std::string& s);

struct PipelineConfig {
  InputMode mode = InputMode::metric;
  std::filesystem::path pred;
  std::filesystem::path optical;
  std::filesystem::path landcover;
  std::filesystem::path dtm;
  std::filesystem::path photons;
  std::filesystem::path reference;
  std::filesystem::path embeddings;
  std::filesystem::path out = "out";

  FeatureSchema features = FeatureSchema::hrf27;
  int patch = 64;
  int stride = 32;
  /// Diameter over which the prediction is averaged around each photon when
  /// forming training targets; below the pixel size it reads the pixel itself.
  double footprint = 0.0;
  std::uint64_t seed = 42;
  unsigned threads = 0;

  ForestParams forest;
  PreprocessParams preprocess;
  AffineFitOptions affine;
  MetricsParams metrics;

  /// Checks required inputs for the full pipeline before any compute.
  /// Throws DomainError naming the first problem.
  void validate() const;
};

/// Applies keys present in `j` on top of `cfg`. Relative paths resolve
/// against `base_dir`. Throws DomainError on unknown enum values.
void apply_config_json(PipelineConfig& cfg, const nlohmann::json& j, const std::filesystem::path& base_dir);
PipelineConfig load_config(const std::filesystem::path& path);

/// Every tunable, without the output directory and thread count, which must
/// not influence results.
nlohmann::ordered_json config_to_json(const PipelineConfig& cfg);

/// Failure inside one pipeline stage; what() names the stage.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& message)
      : std::runtime_error("stage '" + stage + "' failed: " + message), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

// Stage runners shared by the CLI subcommands and the full pipeline. Each one
// reads its inputs, writes its artifacts under `out` and returns its report.

/// clean_photons.csv, preprocess_report.json
nlohmann::ordered_json run_preprocess_stage(const std::filesystem::path& photons, const std::filesystem::path& dtm,
                                            const std::filesystem::path& landcover, const PreprocessParams& params,
                                            const std::filesystem::path& out);

/// affine.json and the rescaled prediction pred_metric.{bin,json}
nlohmann::ordered_json run_fit_scale_stage(const std::filesystem::path& depth,
                                           const std::filesystem::path& clean_photons,
                                           const AffineFitOptions& options, const std::filesystem::path& out);

/// model.json, train_report.json, importance.csv, features.csv
nlohmann::ordered_json run_train_stage(const PipelineConfig& cfg, const std::filesystem::path& pred,
                                       const std::filesystem::path& clean_photons,
                                       const std::filesystem::path& out);

/// residual.{bin,json}, corrected.{bin,json}
nlohmann::ordered_json run_correct_stage(const PipelineConfig& cfg, const std::filesystem::path& pred,
                                         const std::filesystem::path& model, const std::filesystem::path& out);

/// metrics.json and, with a land-cover map, metrics_by_class.csv
nlohmann::ordered_json run_evaluate_stage(const std::filesystem::path& pred, const std::filesystem::path& reference,
                                          const std::filesystem::path& landcover, const MetricsParams& params,
                                          const std::filesystem::path& out, const std::string& name = "metrics");

/// preprocess -> fit-scale (relative mode) -> train -> correct -> evaluate
/// (when a reference is given). Writes summary.json and returns it.
nlohmann::ordered_json run_pipeline(const PipelineConfig& cfg);

/// Writes `j` as indented JSON followed by a newline.
void write_json(const nlohmann::ordered_json& j, const std::filesystem::path& path);

}  // namespace lidar_anchor
