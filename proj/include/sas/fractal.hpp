#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "sas/volume.hpp"

namespace sas {

/// Which box sizes r to use along an axis of extent n.
enum class ScaleSet {
  all,   ///< every integer r in [2, n/2]
  pow2,  ///< powers of two in [2, n/2], for large volumes
};

std::string to_string(ScaleSet scales);
ScaleSet scale_set_from_string(const std::string& name);

enum class ClassSelection { foreground_union, per_class };

/// Directional box-counting result for one axis.
struct AxisFractal {
  double fd = 0.0;         ///< slope clamped to [0, 1]
  double raw_slope = 0.0;  ///< unclamped least-squares slope
  double r_squared = 0.0;
  std::vector<std::int64_t> scales;  ///< box sizes r in voxels
  std::vector<std::int64_t> counts;  ///< N(r), occupied slabs per scale
  bool low_confidence = false;       ///< fewer than 3 scales
};

struct FractalReport {
  std::array<AxisFractal, 3> axes;

  const AxisFractal& operator[](Axis a) const { return axes[static_cast<int>(a)]; }
  std::array<double, 3> fd() const { return {axes[0].fd, axes[1].fd, axes[2].fd}; }
};

/// Per-slice foreground occupancy along `axis`: entry k is 1 when the plane
/// at coordinate k holds any foreground voxel.
std::vector<std::uint8_t> slice_occupancy(const BinaryMask& mask, Axis axis);

/// Number of slabs of thickness r along `axis` (the last one may be thinner)
/// containing foreground. Requires 2 <= r <= extent/2.
std::int64_t count_slabs(const BinaryMask& mask, Axis axis, std::int64_t r);

std::vector<std::int64_t> box_sizes(std::int64_t extent, ScaleSet scales);

/// Least-squares slope of log N(r) against -log r over the box sizes.
AxisFractal fractal_dimension(const BinaryMask& mask, Axis axis, ScaleSet scales = ScaleSet::all);

FractalReport fractal_report(const BinaryMask& mask, ScaleSet scales = ScaleSet::all);

/// foreground_union: one report for all labels > 0, keyed by class 0.
/// per_class: one report per present class.
std::map<Label, FractalReport> fractal_report(const LabelVolume& vol, ClassSelection selection,
                                              ScaleSet scales = ScaleSet::all);

}  // namespace sas
