#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace sas {

using PatchSize = std::array<std::int64_t, 3>;

enum class TiePolicy {
  /// Equal fds are ranked as if fd_x < fd_y < fd_z, so under a full tie x
  /// gets the largest size and z the smallest. The result is a permutation
  /// of the initial sizes.
  stable,
  /// Tied axes below the top rank all receive the largest size of the ranks
  /// they span; tied axes at the top rank all receive the smallest size.
  promote,
};

std::string to_string(TiePolicy policy);
TiePolicy tie_policy_from_string(const std::string& name);

struct PatchPlan {
  PatchSize initial_ps{};
  std::array<double, 3> fd{};
  PatchSize assigned_ps{};
  TiePolicy tie_policy = TiePolicy::stable;
  /// fd_rank[i]: 0 for the most complex axis, 2 for the least complex.
  std::array<int, 3> fd_rank{};
  /// size_rank[i]: rank of assigned_ps[i] among the sorted initial sizes
  /// (0 = smallest).
  std::array<int, 3> size_rank{};
  std::vector<std::string> notes;
};

/// Gives the axis with the largest fractal dimension the smallest patch
/// size, the middle axis the middle size and the least complex axis the
/// largest size.
PatchPlan rank_and_reassign(const PatchSize& initial_ps, const std::array<double, 3>& fd,
                            TiePolicy tie_policy = TiePolicy::stable);

/// Rounds every assigned size to the nearest positive multiple of divisor
/// (halves round up).
PatchPlan snap_to_divisor(const PatchPlan& plan, std::int64_t divisor);

}  // namespace sas
