#include "sas/report_json.hpp"

#include <sstream>

namespace sas {

using nlohmann::json;

namespace {

json axis_object(const FractalReport& r, auto member) {
  json out = json::object();
  for (const Axis a : kAxes) out[to_string(a)] = member(r[a]);
  return out;
}

json point_list(const std::vector<Point>& pts) {
  json out = json::array();
  for (const Point& p : pts) out.push_back({p.x, p.y, p.z});
  return out;
}

}  // namespace

json to_json(const FractalReport& r) {
  return {
      {"fd", axis_object(r, [](const AxisFractal& a) { return a.fd; })},
      {"raw_slope", axis_object(r, [](const AxisFractal& a) { return a.raw_slope; })},
      {"r_squared", axis_object(r, [](const AxisFractal& a) { return a.r_squared; })},
      {"low_confidence", axis_object(r, [](const AxisFractal& a) { return a.low_confidence; })},
      {"scales", axis_object(r, [](const AxisFractal& a) { return a.scales; })},
      {"counts", axis_object(r, [](const AxisFractal& a) { return a.counts; })},
  };
}

FractalReport fractal_report_from_json(const json& j) {
  if (!j.contains("fd")) throw FormatError("fractal report JSON lacks an 'fd' object");
  FractalReport r;
  for (const Axis a : kAxes) {
    AxisFractal& ax = r.axes[static_cast<int>(a)];
    const std::string k = to_string(a);
    ax.fd = j.at("fd").at(k).get<double>();
    if (j.contains("raw_slope")) ax.raw_slope = j["raw_slope"].at(k).get<double>();
    if (j.contains("r_squared")) ax.r_squared = j["r_squared"].at(k).get<double>();
    if (j.contains("low_confidence")) ax.low_confidence = j["low_confidence"].at(k).get<bool>();
    if (j.contains("scales")) ax.scales = j["scales"].at(k).get<std::vector<std::int64_t>>();
    if (j.contains("counts")) ax.counts = j["counts"].at(k).get<std::vector<std::int64_t>>();
  }
  return r;
}

json to_json(const std::map<Label, FractalReport>& per_class) {
  json classes = json::object();
  for (const auto& [label, r] : per_class) classes[std::to_string(label)] = to_json(r);
  return {{"classes", classes}};
}

json to_json(const PatchPlan& plan) {
  json provenance = json::object();
  const char* names[3] = {"x", "y", "z"};
  for (int i = 0; i < 3; ++i) {
    provenance[names[i]] = {{"fd_rank", plan.fd_rank[i]}, {"size_rank", plan.size_rank[i]}};
  }
  return {{"initial_ps", plan.initial_ps}, {"fd", plan.fd},
          {"assigned_ps", plan.assigned_ps}, {"tie_policy", to_string(plan.tie_policy)},
          {"provenance", provenance}, {"notes", plan.notes}};
}

json to_json(const MetricsReport& report) {
  json per_class = json::object();
  for (const auto& [label, m] : report.per_class) {
    per_class[std::to_string(label)] = {{"dice", m.dice},
                                        {"cldice", m.cldice},
                                        {"hd95", m.hd95 ? json(*m.hd95) : json(nullptr)},
                                        {"betti0_error", m.betti0_error},
                                        {"absent_in_pred", m.absent_in_pred}};
  }
  return {{"per_class", per_class},
          {"aggregate",
           {{"dice", report.mean_dice},
            {"cldice", report.mean_cldice},
            {"hd95", report.mean_hd95 ? json(*report.mean_hd95) : json(nullptr)},
            {"betti0_error", report.mean_betti0_error}}},
          {"class_presence", {{"absent_in_pred", report.absent_in_pred}, {"absent_in_ref", report.absent_in_ref}}},
          {"betti0_aggregation", "per-class mean, 26-connectivity"},
          {"cldice_skeleton", "mpc-skel"}};
}

std::string metrics_csv(const MetricsReport& report) {
  std::ostringstream out;
  out.precision(17);
  out << "class,dice,cldice,hd95,betti0_error,absent_in_pred\n";
  for (const auto& [label, m] : report.per_class) {
    out << label << ',' << m.dice << ',' << m.cldice << ',';
    if (m.hd95) out << *m.hd95;
    out << ',' << m.betti0_error << ',' << (m.absent_in_pred ? 1 : 0) << '\n';
  }
  return out.str();
}

json paths_json(const MulticlassSkeleton& skel) {
  json classes = json::object();
  for (const auto& [label, s] : skel.classes) {
    json paths = json::array();
    for (const SkeletonPath& p : s.paths) {
      json voxels = json::array();
      for (const Voxel& v : p.voxels) voxels.push_back({v.x, v.y, v.z});
      paths.push_back({{"voxels", voxels}, {"cost", p.cost}, {"length", p.length}});
    }
    classes[std::to_string(label)] = {{"paths", paths}, {"stubs", s.stubs.size()}};
  }
  return {{"classes", classes}};
}

json centerline_json(const Phantom& phantom) {
  json classes = json::object(), bif = json::object(), term = json::object();
  for (const auto& [label, pieces] : phantom.centerlines) {
    json arr = json::array();
    for (const Polyline& l : pieces) arr.push_back(point_list(l));
    classes[std::to_string(label)] = arr;
  }
  for (const auto& [label, pts] : phantom.bifurcations) bif[std::to_string(label)] = point_list(pts);
  for (const auto& [label, pts] : phantom.terminals) term[std::to_string(label)] = point_list(pts);
  return {{"classes", classes}, {"bifurcations", bif}, {"terminals", term}};
}

}  // namespace sas
