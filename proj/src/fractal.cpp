#include "sas/fractal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sas {

namespace {

std::int64_t count_from_occupancy(const std::vector<std::uint8_t>& occupied, std::int64_t r) {
  const auto n = static_cast<std::int64_t>(occupied.size());
  std::int64_t count = 0;
  for (std::int64_t start = 0; start < n; start += r) {
    const std::int64_t stop = std::min(n, start + r);
    if (std::any_of(occupied.begin() + start, occupied.begin() + stop, [](std::uint8_t o) { return o != 0; })) {
      ++count;
    }
  }
  return count;
}

void check_scale(std::int64_t extent, std::int64_t r) {
  if (r < 2 || r > extent / 2) {
    throw PreconditionError("box size " + std::to_string(r) + " outside [2, " + std::to_string(extent / 2) + "]");
  }
}

}  // namespace

std::string to_string(ScaleSet scales) { return scales == ScaleSet::pow2 ? "pow2" : "all"; }

ScaleSet scale_set_from_string(const std::string& name) {
  if (name == "all") return ScaleSet::all;
  if (name == "pow2") return ScaleSet::pow2;
  throw PreconditionError("unknown scale set '" + name + "' (expected all or pow2)");
}

std::vector<std::uint8_t> slice_occupancy(const BinaryMask& mask, Axis axis) {
  const Dims& d = mask.dims();
  std::vector<std::uint8_t> occupied(static_cast<std::size_t>(d.extent(axis)), 0);
  const auto bits = mask.data();
  for (std::int64_t z = 0; z < d.nz; ++z)
    for (std::int64_t y = 0; y < d.ny; ++y)
      for (std::int64_t x = 0; x < d.nx; ++x) {
        if (!bits[d.index(x, y, z)]) continue;
        const Voxel v{x, y, z};
        occupied[v[axis]] = 1;
      }
  return occupied;
}

std::int64_t count_slabs(const BinaryMask& mask, Axis axis, std::int64_t r) {
  check_scale(mask.dims().extent(axis), r);
  return count_from_occupancy(slice_occupancy(mask, axis), r);
}

std::vector<std::int64_t> box_sizes(std::int64_t extent, ScaleSet scales) {
  std::vector<std::int64_t> out;
  for (std::int64_t r = 2; r <= extent / 2; r = scales == ScaleSet::all ? r + 1 : r * 2) out.push_back(r);
  return out;
}

AxisFractal fractal_dimension(const BinaryMask& mask, Axis axis, ScaleSet scales) {
  const std::int64_t extent = mask.dims().extent(axis);
  if (extent < 4) {
    throw PreconditionError("axis " + to_string(axis) + " extent " + std::to_string(extent) +
                            " is below 4; no box size fits");
  }
  const std::vector<std::uint8_t> occupied = slice_occupancy(mask, axis);
  if (std::none_of(occupied.begin(), occupied.end(), [](std::uint8_t o) { return o != 0; })) {
    throw EmptyShapeError();
  }

  AxisFractal out;
  out.scales = box_sizes(extent, scales);
  std::vector<double> xs, ys;
  for (const std::int64_t r : out.scales) {
    const std::int64_t n = count_from_occupancy(occupied, r);
    out.counts.push_back(n);
    xs.push_back(-std::log(static_cast<double>(r)));
    ys.push_back(std::log(static_cast<double>(n)));
  }
  out.low_confidence = out.scales.size() < 3;

  const auto m = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / m;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0) {
    // A single scale: the slope is undefined.
    out.raw_slope = 0.0;
    out.r_squared = 0.0;
  } else {
    out.raw_slope = sxy / sxx;
    // A flat profile is fitted perfectly by the zero slope.
    out.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  }
  out.fd = std::clamp(out.raw_slope, 0.0, 1.0);
  return out;
}

FractalReport fractal_report(const BinaryMask& mask, ScaleSet scales) {
  FractalReport report;
  for (const Axis a : kAxes) report.axes[static_cast<int>(a)] = fractal_dimension(mask, a, scales);
  return report;
}

std::map<Label, FractalReport> fractal_report(const LabelVolume& vol, ClassSelection selection, ScaleSet scales) {
  std::map<Label, FractalReport> out;
  if (selection == ClassSelection::foreground_union) {
    out.emplace(kBackground, fractal_report(foreground(vol), scales));
    return out;
  }
  const std::vector<Label> classes = present_classes(vol);
  if (classes.empty()) throw EmptyShapeError();
  for (const Label c : classes) out.emplace(c, fractal_report(extract_class(vol, c).mask, scales));
  return out;
}

}  // namespace sas
