#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "sas/fractal.hpp"
#include "sas/phantoms.hpp"

using namespace sas;

namespace {

BinaryMask plane_z(std::int64_t n, std::int64_t z0) {
  std::vector<std::uint8_t> data(static_cast<std::size_t>(n * n * n), 0);
  const Dims d{n, n, n};
  for (std::int64_t y = 0; y < n; ++y)
    for (std::int64_t x = 0; x < n; ++x) data[d.index(x, y, z0)] = 1;
  return BinaryMask(d, {}, std::move(data));
}

}  // namespace

TEST_CASE("full cube slab count") {
  const BinaryMask cube = BinaryMask::filled({16, 16, 16}, {}, 1);
  CHECK(count_slabs(cube, Axis::z, 2) == 8);
  CHECK(count_slabs(cube, Axis::x, 3) == 6);
}

TEST_CASE("single plane occupies one slab") {
  const BinaryMask m = plane_z(16, 5);
  for (std::int64_t r = 2; r <= 8; ++r) CHECK(count_slabs(m, Axis::z, r) == 1);
}

TEST_CASE("scale outside [2, n/2] is rejected") {
  const BinaryMask cube = BinaryMask::filled({16, 16, 16}, {}, 1);
  CHECK_THROWS_AS(count_slabs(cube, Axis::z, 1), PreconditionError);
  CHECK_THROWS_AS(count_slabs(cube, Axis::z, 9), PreconditionError);
}

TEST_CASE("slab counts match the nested-loop scan") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const Dims d = oracle::random_dims(rng, 4, 20);
    const BinaryMask m = oracle::random_mask(rng, d, {}, 0.003);
    for (const Axis a : kAxes) {
      for (std::int64_t r = 2; r <= d.extent(a) / 2; ++r) {
        CHECK(count_slabs(m, a, r) == oracle::count_slabs(m, static_cast<int>(a), r));
      }
    }
  }
}

TEST_CASE("full cube fd is the regression of ceil(n/r)") {
  const std::int64_t n = 64;
  double sx = 0, sy = 0, sxx = 0, sxy = 0, k = 0;
  for (std::int64_t r = 2; r <= n / 2; ++r, ++k) {
    const double x = -std::log(static_cast<double>(r));
    const double y = std::log(static_cast<double>((n + r - 1) / r));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  const FractalReport rep = fractal_report(BinaryMask::filled({n, n, n}, {}, 1));
  for (const Axis a : kAxes) {
    CHECK(rep[a].fd == doctest::Approx(slope).epsilon(1e-12));
    CHECK(rep[a].counts.front() == n / 2);
  }
  const FractalReport pow2 = fractal_report(BinaryMask::filled({n, n, n}, {}, 1), ScaleSet::pow2);
  for (const Axis a : kAxes) CHECK(std::abs(pow2[a].fd - 1.0) <= 1e-12);
}

TEST_CASE("slab counts shrink under integer refinement of r") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const Dims d = oracle::random_dims(rng, 8, 32);
    const BinaryMask m = oracle::random_mask(rng, d, {}, 0.002);
    if (count_foreground(m) == 0) continue;
    for (const Axis a : kAxes) {
      const std::int64_t n = d.extent(a);
      for (std::int64_t r = 2; r <= n / 2; ++r) {
        CHECK(count_slabs(m, a, r) <= (n + r - 1) / r);
        for (std::int64_t kk = 2; kk * r <= n / 2; ++kk) CHECK(count_slabs(m, a, kk * r) <= count_slabs(m, a, r));
      }
    }
  }
}

TEST_CASE("plane has fd zero on its normal") {
  const FractalReport rep = fractal_report(plane_z(32, 7));
  CHECK(rep[Axis::z].fd == 0.0);
  CHECK(rep[Axis::z].raw_slope == 0.0);
}

TEST_CASE("long axis of a cylinder is the most complex") {
  PhantomSpec spec;
  spec.radius = 6.0;
  spec.length = 128.0;
  spec.dims = {32, 32, 136};
  const FractalReport rep = fractal_report(foreground(generate(spec).volume));
  CHECK(rep[Axis::z].fd > rep[Axis::x].fd);
  CHECK(rep[Axis::z].fd > rep[Axis::y].fd);
}

TEST_CASE("scale sets") {
  CHECK(box_sizes(10, ScaleSet::all) == std::vector<std::int64_t>{2, 3, 4, 5});
  CHECK(box_sizes(64, ScaleSet::pow2) == std::vector<std::int64_t>{2, 4, 8, 16, 32});
  CHECK(scale_set_from_string(to_string(ScaleSet::pow2)) == ScaleSet::pow2);
  CHECK_THROWS_AS(scale_set_from_string("log"), PreconditionError);
}

TEST_CASE("short axis gives a low-confidence estimate") {
  const FractalReport rep = fractal_report(BinaryMask::filled({64, 64, 5}, {}, 1));
  CHECK(rep[Axis::z].low_confidence);
  CHECK_FALSE(rep[Axis::x].low_confidence);
}

TEST_CASE("union and per-class selections") {
  std::vector<Label> data(16 * 16 * 16, 0);
  const Dims d{16, 16, 16};
  for (std::int64_t z = 2; z < 14; ++z) data[d.index(3, 4, z)] = 1;
  for (std::int64_t x = 2; x < 14; ++x) data[d.index(x, 9, 7)] = 2;
  const LabelVolume two(d, {}, data);
  const auto uni = fractal_report(two, ClassSelection::foreground_union);
  REQUIRE(uni.size() == 1);
  CHECK(uni.at(0).fd() == fractal_report(foreground(two)).fd());
  CHECK(fractal_report(two, ClassSelection::per_class).size() == 2);

  std::vector<Label> one(data);
  for (auto& v : one) v = v == 2 ? 0 : v;
  const LabelVolume single(d, {}, one);
  const auto pc = fractal_report(single, ClassSelection::per_class);
  REQUIRE(pc.size() == 1);
  CHECK(pc.at(1).fd() == fractal_report(single, ClassSelection::foreground_union).at(0).fd());
}

TEST_CASE("empty mask is rejected") {
  CHECK_THROWS_AS(fractal_report(BinaryMask::filled({8, 8, 8}, {})), EmptyShapeError);
}
