#pragma once

// JSON forms of the library's reports, shared by the CLI and the pipeline.

#include <map>

#include <nlohmann/json.hpp>

#include "sas/fractal.hpp"
#include "sas/metrics.hpp"
#include "sas/mpcskel.hpp"
#include "sas/patchplan.hpp"
#include "sas/phantoms.hpp"

namespace sas {

/// {fd:{x,y,z}, r_squared:{...}, raw_slope:{...}, low_confidence:{...},
///  scales:{x:[...],...}, counts:{x:[...],...}}
nlohmann::json to_json(const FractalReport& report);
FractalReport fractal_report_from_json(const nlohmann::json& j);

/// Per-class reports as {"classes": {"<id>": report}}.
nlohmann::json to_json(const std::map<Label, FractalReport>& per_class);

nlohmann::json to_json(const PatchPlan& plan);

nlohmann::json to_json(const MetricsReport& report);
/// One header line plus one row per class.
std::string metrics_csv(const MetricsReport& report);

/// {"classes": {"<id>": {"paths": [{voxels, cost, length}], "stubs": n}}}
nlohmann::json paths_json(const MulticlassSkeleton& skel);

/// {"classes": {"<id>": [[[x,y,z], ...], ...]}, "bifurcations": ..., "terminals": ...}
nlohmann::json centerline_json(const Phantom& phantom);

}  // namespace sas
