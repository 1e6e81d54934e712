#pragma once

#include <vector>

#include "sas/volume.hpp"

namespace sas {

/// 26-connected component labeling of a mask. Components are numbered
/// 1..count in order of their first voxel in memory order; background is 0.
struct Components {
  std::vector<std::int32_t> labels;
  std::int32_t count = 0;
  std::vector<std::int64_t> sizes;  ///< sizes[c-1] is the voxel count of component c
};

Components label_components(const BinaryMask& mask);

inline std::int32_t count_components(const BinaryMask& mask) { return label_components(mask).count; }

}  // namespace sas
