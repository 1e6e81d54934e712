#pragma once

// Minimum path-cost skeletonization.
//
// A shape's distance field Dist(s) is turned into a boundary-penalizing cost
//
//     C(s) = alpha1 * (1 - Dist(s) / max Dist)^gamma
//
// and the skeleton is grown as a tree of minimum-cost 26-connected paths.
// Every path voxel s marks the voxels within R(s) = alpha2 * Dist(s) + beta
// (mm) as visited; tracing stops once every voxel of the shape is visited.

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sas/edt.hpp"
#include "sas/volume.hpp"

namespace sas {

struct CostParams {
  double alpha1 = 1e5;
  double gamma = 4.0;
};

/// Adaptive visitation radius, physical units.
struct RadiusParams {
  double alpha2 = 1.8;  ///< mm of radius per mm of Dist
  double beta = 4.0;    ///< mm

  double radius(double dist) const { return alpha2 * dist + beta; }
  void validate() const;

  /// Both coefficients given as multiples of the largest voxel spacing.
  static RadiusParams in_spacing_max(double alpha2_mult, double beta_mult, const Spacing& spacing);
  /// alpha2 = 1.8 * spacing_max, beta = 4 * spacing_max.
  static RadiusParams aorta(const Spacing& spacing) { return in_spacing_max(1.8, 4.0, spacing); }
  /// alpha2 = 2.4 * spacing_max, beta = 2 * spacing_max.
  static RadiusParams airway(const Spacing& spacing) { return in_spacing_max(2.4, 2.0, spacing); }
};

/// How the next path endpoint is chosen among the unvisited voxels of
/// largest cost.
enum class EndpointTieBreak {
  farthest_from_skeleton,  ///< largest graph distance from the current skeleton
  farthest_from_anchor,    ///< largest graph distance from the first anchor
};

struct SkeletonParams {
  CostParams cost;
  RadiusParams radius;
  EndpointTieBreak tie_break = EndpointTieBreak::farthest_from_skeleton;
  /// Discard non-initial paths shorter than beta.
  bool suppress_stubs = true;
};

inline double cost_value(double dist, double max_dist, const CostParams& p) {
  return p.alpha1 * std::pow(1.0 - dist / max_dist, p.gamma);
}

/// Cost over the foreground of a distance field; background is impassable.
struct CostField {
  ScalarVolume values;   ///< C(s) on foreground, 0 on background
  BinaryMask passable;   ///< the shape
  CostParams params;
  double max_dist = 0.0;

  /// +infinity on impassable voxels.
  double at(std::int64_t index) const;
};

CostField cost_field(const DistanceField& dist, const CostParams& params = {});

/// A traced path. Once a component is finished, kept paths are thinned:
/// an interior voxel is dropped when its path neighbors are 26-adjacent, or
/// replaced by another path's end voxel adjacent to both, provided its
/// remaining skeleton neighbors stay connected. Junctions are then a single
/// voxel. `cost` is always that of the traced route.
struct SkeletonPath {
  std::vector<Voxel> voxels;   ///< endpoint first; the last voxel touches or lies on the skeleton
  std::vector<double> radii;   ///< R(s) per voxel, mm
  double cost = 0.0;           ///< sum of C(s) * step length, start excluded
  double length = 0.0;         ///< physical length of the voxel chain, mm

  const Voxel& start() const { return voxels.front(); }
  const Voxel& end() const { return voxels.back(); }
};

using VoxelPredicate = std::function<bool(const Voxel&)>;

/// Minimum-cost path inside the cost field's shape from start to the
/// cheapest voxel satisfying `is_target`. Steps are 26-connected; entering
/// voxel s costs C(s) times the physical step length. Ties are broken by
/// (accumulated cost, memory order).
SkeletonPath trace_path(const CostField& cost, const Voxel& start, const VoxelPredicate& is_target);

struct Skeleton {
  std::vector<SkeletonPath> paths;
  /// Short terminal paths that were traced (and marked) but not kept.
  std::vector<SkeletonPath> stubs;
  BinaryMask mask;  ///< union of kept path voxels
  Label class_id = 1;
  SkeletonParams params;

  std::int64_t voxel_count() const { return count_foreground(mask); }
};

/// Skeletonizes each 26-connected component of `shape` independently. An
/// empty shape yields an empty skeleton.
Skeleton skeletonize(const BinaryMask& shape, const SkeletonParams& params, Label class_id = 1);

struct MulticlassSkeleton {
  std::map<Label, Skeleton> classes;
  std::vector<std::string> warnings;
};

/// Independent skeletonization per present class. `per_class` overrides
/// `global` for the listed classes.
MulticlassSkeleton skeletonize_multiclass(const LabelVolume& vol, const SkeletonParams& global,
                                          const std::map<Label, SkeletonParams>& per_class = {});

enum class WeightMode {
  binary,          ///< 1 on skeleton voxels
  distance_decay,  ///< exp(-d_skel / tau) inside the shape
  sphere_dilated,  ///< 1 on shape voxels inside some path voxel's R(s)
};

WeightMode weight_mode_from_string(const std::string& name);
std::string to_string(WeightMode mode);

ScalarVolume weight_map(const Skeleton& skeleton, const BinaryMask& shape, WeightMode mode, double tau = 2.0);

/// Voxelwise maximum of the per-class weight maps.
ScalarVolume multiclass_weight_map(const MulticlassSkeleton& skel, const LabelVolume& vol, WeightMode mode,
                                   double tau = 2.0);

/// Label volume holding each class id on its skeleton voxels.
LabelVolume skeleton_labels(const MulticlassSkeleton& skel, const Dims& dims, const Spacing& spacing);

}  // namespace sas
