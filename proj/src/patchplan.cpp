#include "sas/patchplan.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sas/error.hpp"

namespace sas {

namespace {
constexpr const char* kAxisNames[3] = {"x", "y", "z"};
}

std::string to_string(TiePolicy policy) { return policy == TiePolicy::stable ? "stable" : "promote"; }

TiePolicy tie_policy_from_string(const std::string& name) {
  if (name == "stable") return TiePolicy::stable;
  if (name == "promote") return TiePolicy::promote;
  throw PreconditionError("unknown tie policy '" + name + "'");
}

PatchPlan rank_and_reassign(const PatchSize& initial_ps, const std::array<double, 3>& fd, TiePolicy tie_policy) {
  for (int i = 0; i < 3; ++i) {
    if (initial_ps[i] <= 0) throw PreconditionError("patch sizes must be positive");
    if (!std::isfinite(fd[i])) throw PreconditionError("fractal dimensions must be finite");
  }

  PatchPlan plan;
  plan.initial_ps = initial_ps;
  plan.fd = fd;
  plan.tie_policy = tie_policy;

  // Axes by descending fd; a tie ranks the later axis as more complex.
  std::array<int, 3> by_fd{0, 1, 2};
  std::sort(by_fd.begin(), by_fd.end(), [&](int a, int b) { return fd[a] != fd[b] ? fd[a] > fd[b] : a > b; });
  PatchSize sizes = initial_ps;
  std::sort(sizes.begin(), sizes.end());

  for (int rank = 0; rank < 3; ++rank) {
    plan.fd_rank[by_fd[rank]] = rank;
    plan.size_rank[by_fd[rank]] = rank;
  }

  if (tie_policy == TiePolicy::promote) {
    // Group consecutive ranks with equal fd.
    int begin = 0;
    while (begin < 3) {
      int end = begin + 1;
      while (end < 3 && fd[by_fd[end]] == fd[by_fd[begin]]) ++end;
      if (end - begin > 1) {
        const int target = begin == 0 ? begin : end - 1;
        for (int r = begin; r < end; ++r) plan.size_rank[by_fd[r]] = target;
        std::string axes;
        for (int r = begin; r < end; ++r) axes += kAxisNames[by_fd[r]];
        plan.notes.push_back("fd tie on axes " + axes + " resolved by promote: all receive rank-" +
                             std::to_string(target) + " size " + std::to_string(sizes[target]));
      }
      begin = end;
    }
  }
  for (int i = 0; i < 3; ++i) plan.assigned_ps[i] = sizes[plan.size_rank[i]];
  return plan;
}

PatchPlan snap_to_divisor(const PatchPlan& plan, std::int64_t divisor) {
  if (divisor < 1) throw PreconditionError("divisor must be >= 1");
  PatchPlan out = plan;
  for (int i = 0; i < 3; ++i) {
    const std::int64_t v = plan.assigned_ps[i];
    const std::int64_t down = (v / divisor) * divisor;
    const std::int64_t up = down + divisor;
    std::int64_t snapped = (v - down) * 2 >= divisor ? up : down;
    if (v == down) snapped = v;
    out.assigned_ps[i] = std::max(snapped, divisor);
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      if (plan.assigned_ps[i] != plan.assigned_ps[j] && out.assigned_ps[i] == out.assigned_ps[j]) {
        out.notes.push_back(std::string("snapping to multiples of ") + std::to_string(divisor) +
                            " collapsed the distinction between axes " + kAxisNames[i] + " and " + kAxisNames[j]);
      }
    }
  }
  return out;
}

}  // namespace sas
