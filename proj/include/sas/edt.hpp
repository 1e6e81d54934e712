#pragma once

#include <span>
#include <vector>

#include "sas/volume.hpp"

namespace sas {

/// Distance from each foreground voxel to the nearest background voxel
/// center, in mm. Background voxels hold 0.
struct DistanceField {
  ScalarVolume field;
  std::int64_t foreground_count = 0;
  double max_dist = 0.0;
  Voxel argmax_voxel{};  ///< first voxel in memory order attaining max_dist
};

/// Squared physical distance from every voxel to the nearest site voxel.
/// Voxels with no site anywhere in the grid get +infinity. Exact: the
/// separable lower-envelope transform is run once per axis with the squared
/// spacing as parabola weight.
std::vector<double> squared_distance_to_sites(const Dims& dims, const Spacing& spacing,
                                              std::span<const std::uint8_t> is_site);

/// Exact anisotropic Euclidean distance transform of a mask. A mask with no
/// background is treated as if surrounded by a one-voxel background shell.
DistanceField distance_transform(const BinaryMask& mask);

}  // namespace sas
