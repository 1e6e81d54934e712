// sas: command-line front end. Every subcommand reads its inputs, calls the
// library once and writes the result; nothing is computed here.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "sas/edt.hpp"
#include "sas/fractal.hpp"
#include "sas/io.hpp"
#include "sas/metrics.hpp"
#include "sas/mpcskel.hpp"
#include "sas/patchplan.hpp"
#include "sas/phantoms.hpp"
#include "sas/pipeline.hpp"
#include "sas/report_json.hpp"

namespace {

using nlohmann::json;

/// JSON config for CLI11: top-level keys are global flags, an object under a
/// subcommand name holds that subcommand's flags.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
    json j = json::object();
    for (const CLI::Option* opt : app->get_options()) {
      if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
      const std::string& name = opt->get_lnames().front();
      if (opt->count() > 0) {
        j[name] = opt->as<std::vector<std::string>>();
      } else if (default_also && !opt->get_default_str().empty()) {
        j[name] = opt->get_default_str();
      }
    }
    return j.dump(2) + "\n";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    json j;
    try {
      j = json::parse(input);
    } catch (const json::parse_error& e) {
      throw CLI::ConversionError("config", e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config", "top level must be a JSON object");
    std::vector<CLI::ConfigItem> items;
    flatten(j, {}, items);
    return items;
  }

 private:
  static std::string scalar(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
  }

  static void flatten(const json& obj, const std::vector<std::string>& parents, std::vector<CLI::ConfigItem>& out) {
    for (const auto& [key, v] : obj.items()) {
      if (v.is_object()) {
        auto sub = parents;
        sub.push_back(key);
        flatten(v, sub, out);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (v.is_array()) {
        for (const auto& e : v) item.inputs.push_back(scalar(e));
      } else {
        item.inputs.push_back(scalar(v));
      }
      out.push_back(std::move(item));
    }
  }
};

void emit_json(const json& j, const std::string& path) {
  const std::string text = j.dump(2) + "\n";
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw sas::IoError("cannot create " + path);
  out << text;
  if (!out) throw sas::IoError("write failed for " + path);
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw sas::IoError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw sas::FormatError(path + ": " + e.what());
  }
}

template <class T>
std::vector<T> split_list(const std::string& text, std::size_t expected, const std::string& what) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::stringstream conv(item);
    T v{};
    if (!(conv >> v) || !(conv >> std::ws).eof()) throw sas::PreconditionError("bad " + what + " '" + text + "'");
    out.push_back(v);
  }
  if (out.size() != expected) {
    throw sas::PreconditionError(what + " needs " + std::to_string(expected) + " comma-separated values");
  }
  return out;
}

struct SkelFlags {
  double alpha1 = 1e5;
  double gamma = 4.0;
  double alpha2 = 1.8;
  double beta = 4.0;
  std::string units = "spacing-max";

  void add_to(CLI::App* cmd) {
    cmd->add_option("--alpha1", alpha1, "cost scale")->capture_default_str();
    cmd->add_option("--gamma", gamma, "cost exponent")->capture_default_str();
    cmd->add_option("--alpha2", alpha2, "visitation radius per unit distance")->capture_default_str();
    cmd->add_option("--beta", beta, "visitation radius offset")->capture_default_str();
    cmd->add_option("--radius-units", units, "units of alpha2 and beta")
        ->check(CLI::IsMember({"spacing-max", "mm"}))
        ->capture_default_str();
  }

  sas::SkeletonParams params(const sas::Spacing& spacing) const {
    sas::PipelineConfig c;
    c.alpha1 = alpha1;
    c.gamma = gamma;
    c.alpha2 = alpha2;
    c.beta = beta;
    c.radius_units = sas::radius_units_from_string(units);
    if (!(alpha1 > 0) || !(gamma > 0)) throw sas::PreconditionError("alpha1 and gamma must be positive");
    sas::SkeletonParams p = c.skeleton_params(spacing);
    p.radius.validate();
    return p;
  }
};

/// Runs the skeletonization for one class or all of them.
sas::MulticlassSkeleton skeleton_for(const sas::LabelVolume& vol, const sas::SkeletonParams& p,
                                     std::optional<sas::Label> cls) {
  if (!cls) return sas::skeletonize_multiclass(vol, p);
  sas::ClassMask cm = sas::extract_class(vol, *cls);
  sas::MulticlassSkeleton out;
  if (cm.absent) out.warnings.push_back("class " + std::to_string(*cls) + " is absent");
  out.classes.emplace(*cls, sas::skeletonize(cm.mask, p, *cls));
  return out;
}

void log_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) spdlog::warn("{}", w);
}

}  // namespace

int main(int argc, char** argv) {
  auto logger = spdlog::stderr_color_mt("sas");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");

  CLI::App app{"Shape-aware sampling tools: fractal dimension patch planning, minimum path-cost skeletons, metrics"};
  app.require_subcommand(1);
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON file with flag values (subcommand flags under the subcommand name)");

  int threads = 1;
  std::string log_level = "info";
  std::uint64_t seed = 0;
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error, off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}))
      ->capture_default_str();
  app.add_option("--seed", seed, "random seed for phantom noise and jitter")->capture_default_str();

  // fd
  auto* fd = app.add_subcommand("fd", "axis-specific fractal dimension of a label volume");
  std::string fd_in, fd_out, fd_scales = "all";
  bool fd_per_class = false;
  fd->add_option("volume", fd_in, "label volume")->required();
  fd->add_flag("--per-class", fd_per_class, "one report per class instead of the foreground union");
  fd->add_option("--scales", fd_scales, "box sizes")->check(CLI::IsMember({"all", "pow2"}))->capture_default_str();
  fd->add_option("--out", fd_out, "report JSON ('-' for stdout)")->required();

  // plan-patch
  auto* plan = app.add_subcommand("plan-patch", "reassign patch sizes from a fractal report");
  std::string plan_report, plan_initial, plan_tie = "stable", plan_out;
  std::int64_t plan_divisor = 1;
  std::optional<sas::Label> plan_class;
  plan->add_option("--fd-report", plan_report, "report written by 'fd'")->required();
  plan->add_option("--initial", plan_initial, "initial patch size x,y,z")->required();
  plan->add_option("--tie", plan_tie, "tie policy")->check(CLI::IsMember({"stable", "promote"}))->capture_default_str();
  plan->add_option("--divisor", plan_divisor, "snap sizes to multiples of this")->check(CLI::PositiveNumber);
  plan->add_option("--class", plan_class, "class to plan for when the report is per-class");
  plan->add_option("--out", plan_out, "plan JSON ('-' for stdout)")->required();

  // edt
  auto* edt = app.add_subcommand("edt", "anisotropic Euclidean distance transform of a mask");
  std::string edt_in, edt_out;
  std::optional<sas::Label> edt_class;
  edt->add_option("volume", edt_in, "mask or label volume")->required();
  edt->add_option("--class", edt_class, "use this class instead of all foreground");
  edt->add_option("--out", edt_out, "distance volume (mm)")->required();

  // skel
  auto* skel = app.add_subcommand("skel", "minimum path-cost skeleton");
  std::string skel_in, skel_out, skel_paths;
  std::optional<sas::Label> skel_class;
  bool skel_all = false;
  SkelFlags skel_flags;
  skel->add_option("volume", skel_in, "label volume")->required();
  auto* skel_class_opt = skel->add_option("--class", skel_class, "single class");
  skel->add_flag("--all", skel_all, "every present class (default)")->excludes(skel_class_opt);
  skel_flags.add_to(skel);
  skel->add_option("--out", skel_out, "skeleton label volume")->required();
  skel->add_option("--paths", skel_paths, "path listing JSON");

  // weights
  auto* weights = app.add_subcommand("weights", "skeleton weight map");
  std::string w_in, w_out, w_mode = "binary";
  std::optional<sas::Label> w_class;
  bool w_all = false;
  double w_tau = 2.0;
  SkelFlags w_flags;
  weights->add_option("volume", w_in, "label volume")->required();
  auto* w_class_opt = weights->add_option("--class", w_class, "single class");
  weights->add_flag("--all", w_all, "every present class (default)")->excludes(w_class_opt);
  weights->add_option("--mode", w_mode, "binary, distance-decay or sphere-dilated")->capture_default_str();
  weights->add_option("--tau", w_tau, "decay length for distance-decay (mm)")->capture_default_str();
  w_flags.add_to(weights);
  weights->add_option("--out", w_out, "weight volume")->required();

  // eval
  auto* eval = app.add_subcommand("eval", "Dice, clDice, Hd95 and Betti-0 error per class");
  std::string ev_pred, ev_ref, ev_out, ev_csv;
  SkelFlags ev_flags;
  eval->add_option("--pred", ev_pred, "predicted label volume")->required();
  eval->add_option("--ref", ev_ref, "reference label volume")->required();
  eval->add_option("--out", ev_out, "metrics JSON ('-' for stdout)")->required();
  eval->add_option("--csv", ev_csv, "metrics CSV");
  ev_flags.add_to(eval);

  // phantom
  auto* phantom = app.add_subcommand("phantom", "synthetic tubular phantom");
  sas::PhantomSpec ph;
  std::string ph_kind = "cylinder", ph_dims = "64,64,64", ph_spacing = "1,1,1", ph_axis = "z", ph_out, ph_centerline;
  double ph_noise = 0.0;
  phantom->add_option("--kind", ph_kind, "cylinder, torus, y_branch, ball, helix, multiclass_tree")
      ->capture_default_str();
  phantom->add_option("--radius", ph.radius, "tube radius (mm)")->capture_default_str();
  phantom->add_option("--length", ph.length, "length (mm)")->capture_default_str();
  phantom->add_option("--angle", ph.angle_deg, "branch angle from the parent axis (deg)")->capture_default_str();
  phantom->add_option("--axis", ph_axis, "cylinder axis")->check(CLI::IsMember({"x", "y", "z"}));
  phantom->add_option("--major-radius", ph.major_radius, "torus ring or helix coil radius (mm)")
      ->capture_default_str();
  phantom->add_option("--pitch", ph.pitch, "helix rise per turn (mm)")->capture_default_str();
  phantom->add_option("--turns", ph.turns, "helix turns")->capture_default_str();
  phantom->add_option("--classes", ph.class_count, "multiclass_tree segment count (odd)")->capture_default_str();
  phantom->add_option("--jitter", ph.jitter_deg, "multiclass_tree branching-plane jitter (deg)");
  phantom->add_option("--dims", ph_dims, "grid size x,y,z")->capture_default_str();
  phantom->add_option("--spacing", ph_spacing, "voxel spacing x,y,z (mm)")->capture_default_str();
  phantom->add_option("--noise", ph_noise, "surface toggle probability in [0, 0.3]");
  phantom->add_option("--out", ph_out, "label volume")->required();
  phantom->add_option("--centerline", ph_centerline, "analytic centerline JSON");

  // pipeline
  auto* pipe = app.add_subcommand("pipeline", "fractal report, patch plan, skeletons and weight maps for a dataset");
  sas::PipelineConfig pc;
  std::string pc_dataset, pc_out, pc_initial = "128,128,128", pc_tie = "stable", pc_scales = "all", pc_mode = "binary";
  SkelFlags pc_flags;
  pipe->add_option("--dataset", pc_dataset, "directory of label volumes")->required();
  pipe->add_option("--out-dir", pc_out, "output directory")->required();
  pipe->add_option("--initial", pc_initial, "initial patch size x,y,z")->capture_default_str();
  pipe->add_option("--tie", pc_tie, "tie policy")->check(CLI::IsMember({"stable", "promote"}))->capture_default_str();
  pipe->add_option("--divisor", pc.divisor, "snap sizes to multiples of this")->check(CLI::PositiveNumber);
  pipe->add_option("--scales", pc_scales, "box sizes")->check(CLI::IsMember({"all", "pow2"}))->capture_default_str();
  pipe->add_option("--weight-mode", pc_mode, "binary, distance-decay or sphere-dilated")->capture_default_str();
  pipe->add_option("--tau", pc.tau, "decay length for distance-decay (mm)")->capture_default_str();
  pc_flags.add_to(pipe);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (fd->parsed()) {
      const sas::LabelVolume vol = sas::read_label_volume(fd_in);
      const sas::ScaleSet scales = sas::scale_set_from_string(fd_scales);
      if (fd_per_class) {
        emit_json(sas::to_json(sas::fractal_report(vol, sas::ClassSelection::per_class, scales)), fd_out);
      } else {
        emit_json(sas::to_json(sas::fractal_report(sas::foreground(vol), scales)), fd_out);
      }
    } else if (plan->parsed()) {
      const json report = read_json(plan_report);
      json entry = report;
      if (report.contains("classes")) {
        if (!plan_class) throw sas::PreconditionError("per-class report: choose a class with --class");
        const std::string key = std::to_string(*plan_class);
        if (!report["classes"].contains(key)) throw sas::PreconditionError("class " + key + " not in report");
        entry = report["classes"][key];
      }
      const auto initial = split_list<std::int64_t>(plan_initial, 3, "--initial");
      sas::PatchPlan p = sas::rank_and_reassign({initial[0], initial[1], initial[2]},
                                                sas::fractal_report_from_json(entry).fd(),
                                                sas::tie_policy_from_string(plan_tie));
      if (plan_divisor > 1) p = sas::snap_to_divisor(p, plan_divisor);
      emit_json(sas::to_json(p), plan_out);
    } else if (edt->parsed()) {
      const sas::LabelVolume vol = sas::read_label_volume(edt_in);
      const sas::BinaryMask mask = edt_class ? sas::extract_class(vol, *edt_class).mask : sas::foreground(vol);
      sas::write_volume(sas::distance_transform(mask).field, edt_out);
    } else if (skel->parsed()) {
      const sas::LabelVolume vol = sas::read_label_volume(skel_in);
      const auto result = skeleton_for(vol, skel_flags.params(vol.spacing()), skel_class);
      log_warnings(result.warnings);
      sas::write_volume(sas::skeleton_labels(result, vol.dims(), vol.spacing()), skel_out);
      if (!skel_paths.empty()) emit_json(sas::paths_json(result), skel_paths);
    } else if (weights->parsed()) {
      const sas::LabelVolume vol = sas::read_label_volume(w_in);
      const sas::WeightMode mode = sas::weight_mode_from_string(w_mode);
      const auto result = skeleton_for(vol, w_flags.params(vol.spacing()), w_class);
      log_warnings(result.warnings);
      if (w_class) {
        const sas::BinaryMask shape = sas::extract_class(vol, *w_class).mask;
        sas::write_volume(sas::weight_map(result.classes.at(*w_class), shape, mode, w_tau), w_out);
      } else {
        sas::write_volume(sas::multiclass_weight_map(result, vol, mode, w_tau), w_out);
      }
    } else if (eval->parsed()) {
      const sas::LabelVolume pred = sas::read_label_volume(ev_pred);
      const sas::LabelVolume ref = sas::read_label_volume(ev_ref);
      const sas::MetricsReport report = sas::evaluate(pred, ref, ev_flags.params(ref.spacing()));
      emit_json(sas::to_json(report), ev_out);
      if (!ev_csv.empty()) {
        std::ofstream out(ev_csv, std::ios::trunc);
        if (!out) throw sas::IoError("cannot create " + ev_csv);
        out << sas::metrics_csv(report);
      }
    } else if (phantom->parsed()) {
      ph.kind = sas::phantom_kind_from_string(ph_kind);
      ph.axis = sas::axis_from_string(ph_axis);
      const auto d = split_list<std::int64_t>(ph_dims, 3, "--dims");
      const auto s = split_list<double>(ph_spacing, 3, "--spacing");
      ph.dims = {d[0], d[1], d[2]};
      ph.spacing = {s[0], s[1], s[2]};
      ph.rng_seed = seed;
      sas::Phantom result = sas::generate(ph);
      if (ph_noise > 0.0) result = sas::perturb(result, ph_noise, seed);
      sas::write_volume(result.volume, ph_out);
      if (!ph_centerline.empty()) emit_json(sas::centerline_json(result), ph_centerline);
    } else if (pipe->parsed()) {
      pc.dataset_dir = pc_dataset;
      pc.output_dir = pc_out;
      const auto initial = split_list<std::int64_t>(pc_initial, 3, "--initial");
      pc.initial_ps = {initial[0], initial[1], initial[2]};
      pc.tie_policy = sas::tie_policy_from_string(pc_tie);
      pc.scales = sas::scale_set_from_string(pc_scales);
      pc.weight_mode = sas::weight_mode_from_string(pc_mode);
      pc.alpha1 = pc_flags.alpha1;
      pc.gamma = pc_flags.gamma;
      pc.alpha2 = pc_flags.alpha2;
      pc.beta = pc_flags.beta;
      pc.radius_units = sas::radius_units_from_string(pc_flags.units);
      pc.threads = threads;
      const sas::PipelineSummary summary = sas::run_pipeline(pc);
      std::cout << summary.manifest_path.string() << "\n";
      spdlog::info("{} of {} case(s) succeeded", summary.succeeded, summary.cases);
      return summary.exit_code();
    }
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
