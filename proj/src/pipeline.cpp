#include "sas/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <ctime>
#include <fstream>
#include <mutex>
#include <thread>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "sas/io.hpp"
#include "sas/report_json.hpp"

namespace sas {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string case_stem(const fs::path& p) {
  std::string name = p.filename().string();
  for (const std::string ext : {".nii.gz", ".nii", ".json"}) {
    if (name.size() > ext.size() && name.compare(name.size() - ext.size(), ext.size(), ext) == 0) {
      return name.substr(0, name.size() - ext.size());
    }
  }
  return name;
}

void write_text(const fs::path& path, const std::string& text) {
  const fs::path tmp = fs::path(path) += ".partial";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw IoError("cannot create " + tmp.string());
    out << text;
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

struct CaseResult {
  json record;
  bool ok = false;
  std::array<double, 3> fd{};
};

CaseResult run_case(const PipelineConfig& cfg, const fs::path& input) {
  const std::string stem = case_stem(input);
  CaseResult res;
  res.record = {{"input", input.filename().string()}, {"case", stem}};
  try {
    const LabelVolume vol = read_label_volume(input);
    const FractalReport fd = fractal_report(foreground(vol), cfg.scales);
    const SkeletonParams params = cfg.skeleton_params(vol.spacing());
    const MulticlassSkeleton skel = skeletonize_multiclass(vol, params);

    const std::string skel_name = stem + "_skeleton.nii.gz";
    const std::string weight_name = stem + "_weights.nii.gz";
    const std::string paths_name = stem + "_paths.json";
    const std::string fd_name = stem + "_fd.json";
    write_volume(skeleton_labels(skel, vol.dims(), vol.spacing()), cfg.output_dir / skel_name);
    write_volume(multiclass_weight_map(skel, vol, cfg.weight_mode, cfg.tau), cfg.output_dir / weight_name);
    write_text(cfg.output_dir / paths_name, paths_json(skel).dump() + "\n");
    write_text(cfg.output_dir / fd_name, to_json(fd).dump(2) + "\n");

    json classes = json::object();
    for (const auto& [label, s] : skel.classes) {
      classes[std::to_string(label)] = {{"paths", s.paths.size()},
                                        {"stubs", s.stubs.size()},
                                        {"skeleton_voxels", s.voxel_count()}};
    }
    res.fd = fd.fd();
    res.record["status"] = "ok";
    res.record["fd"] = res.fd;
    res.record["dims"] = {vol.dims().nx, vol.dims().ny, vol.dims().nz};
    res.record["spacing"] = {vol.spacing().x, vol.spacing().y, vol.spacing().z};
    res.record["radius_mm"] = {{"alpha2", params.radius.alpha2}, {"beta", params.radius.beta}};
    res.record["classes"] = classes;
    res.record["warnings"] = skel.warnings;
    res.record["outputs"] = {{"skeleton", skel_name}, {"weights", weight_name}, {"paths", paths_name},
                             {"fd_report", fd_name}};
    res.ok = true;
  } catch (const std::exception& e) {
    res.record["status"] = "failed";
    res.record["error"] = e.what();
  }
  return res;
}

std::shared_ptr<spdlog::logger> logger() {
  static std::mutex m;
  const std::lock_guard lock(m);
  if (auto existing = spdlog::get("sas")) return existing;
  return spdlog::stderr_color_mt("sas");
}

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string to_string(RadiusUnits units) { return units == RadiusUnits::mm ? "mm" : "spacing-max"; }

RadiusUnits radius_units_from_string(const std::string& name) {
  if (name == "mm") return RadiusUnits::mm;
  if (name == "spacing-max" || name == "spacing_max") return RadiusUnits::spacing_max;
  throw PreconditionError("unknown radius units '" + name + "' (expected spacing-max or mm)");
}

void PipelineConfig::validate() const {
  if (!fs::is_directory(dataset_dir)) throw PreconditionError("dataset_dir is not a directory: " + dataset_dir.string());
  if (output_dir.empty()) throw PreconditionError("output_dir must be set");
  if (threads < 1) throw PreconditionError("threads must be >= 1");
  for (const auto ps : initial_ps) {
    if (ps <= 0) throw PreconditionError("initial patch sizes must be positive");
  }
  if (divisor < 1) throw PreconditionError("divisor must be >= 1");
  if (!(alpha1 > 0) || !(gamma > 0) || !(tau > 0)) throw PreconditionError("alpha1, gamma and tau must be positive");
  RadiusParams{alpha2, beta}.validate();
}

SkeletonParams PipelineConfig::skeleton_params(const Spacing& spacing) const {
  SkeletonParams p;
  p.cost = {alpha1, gamma};
  p.radius = radius_units == RadiusUnits::mm ? RadiusParams{alpha2, beta}
                                             : RadiusParams::in_spacing_max(alpha2, beta, spacing);
  return p;
}

PipelineConfig pipeline_config_from_json(const json& j) {
  PipelineConfig c;
  for (const auto& [key, v] : j.items()) {
    if (key == "dataset_dir") c.dataset_dir = v.get<std::string>();
    else if (key == "output_dir") c.output_dir = v.get<std::string>();
    else if (key == "initial_ps") c.initial_ps = v.get<PatchSize>();
    else if (key == "tie_policy") c.tie_policy = tie_policy_from_string(v.get<std::string>());
    else if (key == "divisor") c.divisor = v.get<std::int64_t>();
    else if (key == "scales") c.scales = scale_set_from_string(v.get<std::string>());
    else if (key == "alpha1") c.alpha1 = v.get<double>();
    else if (key == "gamma") c.gamma = v.get<double>();
    else if (key == "alpha2") c.alpha2 = v.get<double>();
    else if (key == "beta") c.beta = v.get<double>();
    else if (key == "radius_units") c.radius_units = radius_units_from_string(v.get<std::string>());
    else if (key == "weight_mode") c.weight_mode = weight_mode_from_string(v.get<std::string>());
    else if (key == "tau") c.tau = v.get<double>();
    else if (key == "threads") c.threads = v.get<int>();
    else throw PreconditionError("unknown pipeline config key '" + key + "'");
  }
  return c;
}

std::vector<fs::path> discover_cases(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    const auto ends = [&](const std::string& s) {
      return name.size() >= s.size() && name.compare(name.size() - s.size(), s.size(), s) == 0;
    };
    if (ends(".nii") || ends(".nii.gz") || ends(".json")) out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

PipelineSummary run_pipeline(const PipelineConfig& cfg) {
  cfg.validate();
  fs::create_directories(cfg.output_dir);
  const std::vector<fs::path> inputs = discover_cases(cfg.dataset_dir);
  if (inputs.empty()) throw PreconditionError("no label volumes found in " + cfg.dataset_dir.string());
  logger()->info("pipeline: {} case(s), {} worker(s)", inputs.size(), cfg.threads);

  std::vector<CaseResult> results(inputs.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  {
    std::vector<std::jthread> workers;
    const auto n_workers = std::min<std::size_t>(static_cast<std::size_t>(cfg.threads), inputs.size());
    for (std::size_t w = 0; w < n_workers; ++w) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < inputs.size(); i = next++) {
          results[i] = run_case(cfg, inputs[i]);
          const std::lock_guard lock(log_mutex);
          if (results[i].ok) {
            logger()->info("case {}: ok", inputs[i].filename().string());
          } else {
            logger()->error("case {}: {}", inputs[i].filename().string(), results[i].record["error"].get<std::string>());
          }
        }
      });
    }
  }

  PipelineSummary summary;
  summary.cases = static_cast<int>(inputs.size());
  json cases = json::array();
  std::array<double, 3> fd_sum{};
  for (const CaseResult& r : results) {
    cases.push_back(r.record);
    if (!r.ok) {
      ++summary.failed;
      continue;
    }
    ++summary.succeeded;
    for (int k = 0; k < 3; ++k) fd_sum[k] += r.fd[k];
  }

  json manifest = {
      {"cases", cases},
      {"counts", {{"cases", summary.cases}, {"succeeded", summary.succeeded}, {"failed", summary.failed}}},
      {"parameters",
       {{"alpha1", cfg.alpha1}, {"gamma", cfg.gamma}, {"alpha2", cfg.alpha2}, {"beta", cfg.beta},
        {"radius_units", to_string(cfg.radius_units)}, {"weight_mode", to_string(cfg.weight_mode)},
        {"tau", cfg.tau}, {"initial_ps", cfg.initial_ps}, {"tie_policy", to_string(cfg.tie_policy)},
        {"divisor", cfg.divisor}, {"scales", to_string(cfg.scales)}}},
  };
  if (summary.succeeded > 0) {
    std::array<double, 3> mean{};
    for (int k = 0; k < 3; ++k) mean[k] = fd_sum[k] / summary.succeeded;
    PatchPlan plan = rank_and_reassign(cfg.initial_ps, mean, cfg.tie_policy);
    if (cfg.divisor > 1) plan = snap_to_divisor(plan, cfg.divisor);
    write_text(cfg.output_dir / "plan.json", to_json(plan).dump(2) + "\n");
    manifest["dataset_fd"] = {{"fd", mean}, {"aggregation", "mean of per-case foreground-union FD"}};
    manifest["plan"] = {{"file", "plan.json"}, {"assigned_ps", plan.assigned_ps}};
  }
  manifest["generated_at"] = utc_timestamp();

  summary.manifest_path = cfg.output_dir / "manifest.json";
  write_text(summary.manifest_path, manifest.dump(2) + "\n");
  summary.manifest = std::move(manifest);
  return summary;
}

}  // namespace sas
