#include <doctest.h>

#include <algorithm>
#include <limits>
#include <cmath>
#include <random>

#include "sas/error.hpp"
#include "sas/patchplan.hpp"

using namespace sas;

namespace {

// Nearest multiple of d by scanning every candidate; halves go up.
std::int64_t nearest_multiple(std::int64_t v, std::int64_t d) {
  std::int64_t best = d;
  std::int64_t best_gap = std::numeric_limits<std::int64_t>::max();
  for (std::int64_t m = d; m <= 2 * v + d; m += d) {
    const std::int64_t gap = std::abs(m - v);
    if (gap < best_gap || (gap == best_gap && m > best)) {
      best = m;
      best_gap = gap;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("airway mapping, stable") {
  const PatchPlan p = rank_and_reassign({128, 96, 192}, {0.44, 0.40, 0.53}, TiePolicy::stable);
  CHECK(p.assigned_ps == PatchSize{128, 192, 96});
  CHECK(p.fd_rank == std::array<int, 3>{1, 2, 0});
}

TEST_CASE("aorta mapping, promote") {
  const PatchPlan p = rank_and_reassign({112, 112, 176}, {0.58, 0.58, 0.71}, TiePolicy::promote);
  CHECK(p.assigned_ps == PatchSize{176, 176, 112});
  CHECK_FALSE(p.notes.empty());
}

TEST_CASE("full tie under stable gives x the largest size") {
  const PatchPlan p = rank_and_reassign({96, 192, 128}, {0.5, 0.5, 0.5}, TiePolicy::stable);
  CHECK(p.assigned_ps == PatchSize{192, 128, 96});
  const PatchPlan id = rank_and_reassign({192, 128, 96}, {0.5, 0.5, 0.5}, TiePolicy::stable);
  CHECK(id.assigned_ps == PatchSize{192, 128, 96});
}

TEST_CASE("tie at the top rank under promote gives both the smallest size") {
  const PatchPlan p = rank_and_reassign({64, 96, 128}, {0.7, 0.7, 0.3}, TiePolicy::promote);
  CHECK(p.assigned_ps == PatchSize{64, 64, 128});
}

TEST_CASE("invalid inputs") {
  CHECK_THROWS_AS(rank_and_reassign({0, 1, 1}, {0, 0, 0}), PreconditionError);
  CHECK_THROWS_AS(rank_and_reassign({1, 1, 1}, {std::nan(""), 0, 0}), PreconditionError);
  CHECK_THROWS_AS(snap_to_divisor(PatchPlan{}, 0), PreconditionError);
  CHECK_THROWS_AS(tie_policy_from_string("random"), PreconditionError);
}

TEST_CASE("random triples keep the inverse ordering and the permutation") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::int64_t> size(16, 256);
  std::uniform_real_distribution<double> fd(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const PatchSize ps{size(rng), size(rng), size(rng)};
    const std::array<double, 3> f{fd(rng), fd(rng), fd(rng)};
    for (const TiePolicy policy : {TiePolicy::stable, TiePolicy::promote}) {
      const PatchPlan p = rank_and_reassign(ps, f, policy);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          if (f[i] > f[j]) CHECK(p.assigned_ps[i] <= p.assigned_ps[j]);
      const int top = static_cast<int>(std::max_element(f.begin(), f.end()) - f.begin());
      CHECK(p.assigned_ps[top] == *std::min_element(ps.begin(), ps.end()));
      PatchSize a = p.assigned_ps, b = ps;
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      CHECK(a == b);
    }
  }
}

TEST_CASE("snap keeps multiples") {
  PatchPlan p;
  p.assigned_ps = {176, 176, 112};
  CHECK(snap_to_divisor(p, 16).assigned_ps == PatchSize{176, 176, 112});
}

TEST_CASE("snap collapses with a note") {
  PatchPlan p;
  p.assigned_ps = {100, 150, 90};
  const PatchPlan s = snap_to_divisor(p, 16);
  CHECK(s.assigned_ps == PatchSize{96, 144, 96});
  CHECK(s.notes.size() == 1);
}

TEST_CASE("snap matches exhaustive candidate search") {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<std::int64_t> size(1, 300), div(1, 40);
  for (int trial = 0; trial < 300; ++trial) {
    PatchPlan p;
    p.assigned_ps = {size(rng), size(rng), size(rng)};
    const std::int64_t d = div(rng);
    const PatchPlan s = snap_to_divisor(p, d);
    for (int i = 0; i < 3; ++i) CHECK(s.assigned_ps[i] == nearest_multiple(p.assigned_ps[i], d));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (p.assigned_ps[i] < p.assigned_ps[j]) CHECK(s.assigned_ps[i] <= s.assigned_ps[j]);
  }
}

TEST_CASE("divisor one is the identity") {
  PatchPlan p;
  p.assigned_ps = {37, 101, 64};
  CHECK(snap_to_divisor(p, 1).assigned_ps == p.assigned_ps);
}
