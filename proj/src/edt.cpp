#include "sas/edt.hpp"

#include <cmath>
#include <limits>

namespace sas {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// One-dimensional lower envelope of parabolas w*(q-p)^2 + f[p] over the
// finite entries of f; writes the minimum for every q into d.
void envelope_1d(std::span<const double> f, double w, std::span<double> d, std::vector<std::int64_t>& v,
                 std::vector<double>& z) {
  const auto n = static_cast<std::int64_t>(f.size());
  v.resize(f.size());
  z.resize(f.size() + 1);
  std::int64_t k = -1;
  for (std::int64_t q = 0; q < n; ++q) {
    if (f[q] == kInf) continue;
    const double fq = f[q] + w * static_cast<double>(q * q);
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -kInf;
      z[1] = kInf;
      continue;
    }
    double s = 0.0;
    for (;;) {
      const std::int64_t p = v[k];
      s = (fq - (f[p] + w * static_cast<double>(p * p))) / (2.0 * w * static_cast<double>(q - p));
      if (s <= z[k] && k > 0) {
        --k;
        continue;
      }
      break;
    }
    if (s <= z[k]) {
      // k == 0 and the new parabola dominates the only remaining one.
      v[0] = q;
      z[0] = -kInf;
      z[1] = kInf;
      continue;
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  if (k < 0) {
    std::fill(d.begin(), d.end(), kInf);
    return;
  }
  std::int64_t j = 0;
  for (std::int64_t q = 0; q < n; ++q) {
    while (z[j + 1] < static_cast<double>(q)) ++j;
    const double dq = static_cast<double>(q - v[j]);
    d[q] = w * dq * dq + f[v[j]];
  }
}

void transform_axis(const Dims& dims, double w, Axis axis, std::vector<double>& g) {
  const std::int64_t n = dims.extent(axis);
  const std::int64_t stride = axis == Axis::x ? 1 : (axis == Axis::y ? dims.nx : dims.nx * dims.ny);
  std::vector<double> line(static_cast<std::size_t>(n));
  std::vector<double> out(static_cast<std::size_t>(n));
  std::vector<std::int64_t> v;
  std::vector<double> z;
  // Every line along `axis` starts at a voxel whose `axis` coordinate is 0.
  for (std::int64_t start = 0; start < dims.size(); ++start) {
    if (dims.voxel(start)[axis] != 0) continue;
    for (std::int64_t i = 0; i < n; ++i) line[i] = g[start + i * stride];
    envelope_1d(line, w, out, v, z);
    for (std::int64_t i = 0; i < n; ++i) g[start + i * stride] = out[i];
  }
}

}  // namespace

std::vector<double> squared_distance_to_sites(const Dims& dims, const Spacing& spacing,
                                              std::span<const std::uint8_t> is_site) {
  if (static_cast<std::int64_t>(is_site.size()) != dims.size()) {
    throw DimsMismatchError("squared_distance_to_sites: site array length mismatch");
  }
  std::vector<double> g(is_site.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = is_site[i] ? 0.0 : kInf;
  for (const Axis a : kAxes) transform_axis(dims, spacing[a] * spacing[a], a, g);
  return g;
}

DistanceField distance_transform(const BinaryMask& mask) {
  const Dims& dims = mask.dims();
  const auto bits = mask.data();
  const std::int64_t fg = count_foreground(mask);
  if (fg == 0) throw EmptyShapeError();

  std::vector<double> dist(bits.size(), 0.0);
  if (fg < dims.size()) {
    std::vector<std::uint8_t> sites(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) sites[i] = bits[i] ? 0 : 1;
    const std::vector<double> sq = squared_distance_to_sites(dims, mask.spacing(), sites);
    for (std::size_t i = 0; i < bits.size(); ++i) dist[i] = bits[i] ? std::sqrt(sq[i]) : 0.0;
  } else {
    // No background: pad with a one-voxel background shell.
    const Dims padded{dims.nx + 2, dims.ny + 2, dims.nz + 2};
    std::vector<std::uint8_t> sites(static_cast<std::size_t>(padded.size()), 1);
    for (std::int64_t z = 0; z < dims.nz; ++z)
      for (std::int64_t y = 0; y < dims.ny; ++y)
        for (std::int64_t x = 0; x < dims.nx; ++x) sites[padded.index(x + 1, y + 1, z + 1)] = 0;
    const std::vector<double> sq = squared_distance_to_sites(padded, mask.spacing(), sites);
    for (std::int64_t z = 0; z < dims.nz; ++z)
      for (std::int64_t y = 0; y < dims.ny; ++y)
        for (std::int64_t x = 0; x < dims.nx; ++x)
          dist[dims.index(x, y, z)] = std::sqrt(sq[padded.index(x + 1, y + 1, z + 1)]);
  }

  DistanceField out{ScalarVolume::filled(dims, mask.spacing()), fg, 0.0, {}};
  std::int64_t best = -1;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (bits[i] && (best < 0 || dist[i] > out.max_dist)) {
      out.max_dist = dist[i];
      best = static_cast<std::int64_t>(i);
    }
  }
  out.argmax_voxel = dims.voxel(best);
  out.field = ScalarVolume(dims, mask.spacing(), std::move(dist));
  return out;
}

}  // namespace sas
