#pragma once

#include <map>
#include <optional>
#include <vector>

#include "sas/mpcskel.hpp"
#include "sas/phantoms.hpp"
#include "sas/volume.hpp"

namespace sas {

/// 2|P∩R| / (|P|+|R|); 1 when both are empty.
double dice(const BinaryMask& pred, const BinaryMask& ref);

struct ClDiceParts {
  double precision = 0.0;    ///< |S_pred ∩ R| / |S_pred|
  double sensitivity = 0.0;  ///< |S_ref ∩ P| / |S_ref|
  double cldice = 0.0;       ///< harmonic mean of the two
};

/// clDice from externally supplied skeleton masks. Both skeletons empty
/// gives 1, exactly one empty gives 0.
ClDiceParts cl_dice_from_skeletons(const BinaryMask& pred, const BinaryMask& ref, const BinaryMask& pred_skeleton,
                                   const BinaryMask& ref_skeleton);

/// clDice with minimum path-cost skeletons of both masks.
ClDiceParts cl_dice(const BinaryMask& pred, const BinaryMask& ref, const SkeletonParams& params);

/// 95th percentile (linear interpolation) of the pooled distances from each
/// surface voxel of one mask to the nearest surface voxel of the other, in
/// both directions. nullopt when either mask is empty.
std::optional<double> hd95(const BinaryMask& pred, const BinaryMask& ref);

/// Surface voxel: foreground with at least one face-adjacent background
/// voxel; positions outside the grid count as background.
BinaryMask boundary_voxels(const BinaryMask& mask);

/// |components(pred) - components(ref)|, 26-connectivity.
std::int64_t betti0_error(const BinaryMask& pred, const BinaryMask& ref);

struct ClassMetrics {
  double dice = 0.0;
  double cldice = 0.0;
  std::optional<double> hd95;
  std::int64_t betti0_error = 0;
  bool absent_in_pred = false;
};

struct MetricsReport {
  std::map<Label, ClassMetrics> per_class;
  /// Means over the reported classes; hd95 over classes where it is defined.
  double mean_dice = 0.0;
  double mean_cldice = 0.0;
  std::optional<double> mean_hd95;
  double mean_betti0_error = 0.0;
  std::vector<Label> absent_in_pred;
  std::vector<Label> absent_in_ref;  ///< predicted classes missing from the reference (not scored)
};

/// All four metrics for every class present in `ref`.
MetricsReport evaluate(const LabelVolume& pred, const LabelVolume& ref, const SkeletonParams& skeleton_params);

struct CenterlineFidelity {
  double mean_dist = 0.0;  ///< mm, skeleton voxel centers to the centerline
  double max_dist = 0.0;
  double coverage = 0.0;  ///< fraction of centerline samples within 2 voxel diagonals of the skeleton
};

CenterlineFidelity centerline_fidelity(const BinaryMask& skeleton, const std::vector<Polyline>& centerline);

}  // namespace sas
