#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "sas/edt.hpp"

using namespace sas;

TEST_CASE("center of a 3x3x3 block in a 5x5x5 grid") {
  std::vector<std::uint8_t> data(125, 0);
  const Dims d{5, 5, 5};
  for (int z = 1; z < 4; ++z)
    for (int y = 1; y < 4; ++y)
      for (int x = 1; x < 4; ++x) data[d.index(x, y, z)] = 1;
  const DistanceField f = distance_transform(BinaryMask(d, {}, data));
  CHECK(f.field.at(2, 2, 2) == 2.0);
  CHECK(f.max_dist == 2.0);
  CHECK(f.argmax_voxel == Voxel{2, 2, 2});
  CHECK(f.foreground_count == 27);
  CHECK(f.field.at(0, 0, 0) == 0.0);
}

TEST_CASE("isolated voxel takes the smallest spacing") {
  std::vector<std::uint8_t> data(27, 0);
  data[13] = 1;
  const DistanceField f = distance_transform(BinaryMask({3, 3, 3}, {1.0, 1.0, 0.5}, data));
  CHECK(f.field[13] == 0.5);
}

TEST_CASE("all-foreground grid measures to the virtual shell") {
  const DistanceField f = distance_transform(BinaryMask::filled({4, 4, 4}, {}, 1));
  CHECK(f.field.at(0, 0, 0) == 1.0);
  CHECK(f.field.at(1, 1, 1) == 2.0);
}

TEST_CASE("empty mask is rejected") {
  CHECK_THROWS_AS(distance_transform(BinaryMask::filled({4, 4, 4}, {})), EmptyShapeError);
}

TEST_CASE("matches brute force on random anisotropic masks") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 25; ++trial) {
    const Dims d = oracle::random_dims(rng, 1, 14);
    const Spacing s = oracle::random_spacing(rng);
    const double density = std::uniform_real_distribution<double>(0.5, 0.98)(rng);
    const BinaryMask m = oracle::random_mask(rng, d, s, density);
    if (count_foreground(m) == 0) continue;
    const DistanceField f = distance_transform(m);
    const std::vector<double> ref = oracle::edt(m);
    double worst = 0.0;
    for (std::int64_t i = 0; i < d.size(); ++i) {
      const double e = std::abs(f.field[i] - ref[static_cast<std::size_t>(i)]);
      worst = std::max(worst, ref[static_cast<std::size_t>(i)] > 0 ? e / ref[static_cast<std::size_t>(i)] : e);
    }
    CHECK(worst <= 1e-9);
  }
}

TEST_CASE("site transform reports infinity without sites") {
  const std::vector<std::uint8_t> none(8, 0);
  const auto sq = squared_distance_to_sites({2, 2, 2}, {}, none);
  for (const double v : sq) CHECK(std::isinf(v));
}
