#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "sas/fractal.hpp"
#include "sas/mpcskel.hpp"
#include "sas/patchplan.hpp"

namespace sas {

enum class RadiusUnits {
  spacing_max,  ///< alpha2 and beta are multiples of the case's largest spacing
  mm,
};

std::string to_string(RadiusUnits units);
RadiusUnits radius_units_from_string(const std::string& name);

struct PipelineConfig {
  std::filesystem::path dataset_dir;
  std::filesystem::path output_dir;
  PatchSize initial_ps{128, 128, 128};
  TiePolicy tie_policy = TiePolicy::stable;
  std::int64_t divisor = 1;
  ScaleSet scales = ScaleSet::all;
  double alpha1 = 1e5;
  double gamma = 4.0;
  double alpha2 = 1.8;
  double beta = 4.0;
  RadiusUnits radius_units = RadiusUnits::spacing_max;
  WeightMode weight_mode = WeightMode::binary;
  double tau = 2.0;
  int threads = 1;

  void validate() const;
  SkeletonParams skeleton_params(const Spacing& spacing) const;
};

/// Reads the keys of a JSON object onto a config (unknown keys rejected).
PipelineConfig pipeline_config_from_json(const nlohmann::json& j);

struct PipelineSummary {
  int cases = 0;
  int succeeded = 0;
  int failed = 0;
  std::filesystem::path manifest_path;
  nlohmann::json manifest;

  int exit_code() const { return failed == 0 && cases > 0 ? 0 : 1; }
};

/// Label volumes (.nii, .nii.gz, raw .json sidecars) directly inside `dir`,
/// sorted by file name.
std::vector<std::filesystem::path> discover_cases(const std::filesystem::path& dir);

/// Per case: fractal report of the foreground union, per-class skeletons,
/// skeleton label volume, weight map and path listing. Dataset level: mean
/// FD over successful cases and one patch plan. Writes manifest.json into
/// the output directory; its only run-dependent field is "generated_at".
PipelineSummary run_pipeline(const PipelineConfig& config);

}  // namespace sas
