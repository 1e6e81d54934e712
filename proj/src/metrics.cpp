#include "sas/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sas/components.hpp"
#include "sas/edt.hpp"

namespace sas {

namespace {

std::int64_t overlap(const BinaryMask& a, const BinaryMask& b) {
  const auto x = a.data(), y = b.data();
  std::int64_t n = 0;
  for (std::size_t i = 0; i < x.size(); ++i) n += (x[i] && y[i]) ? 1 : 0;
  return n;
}

double harmonic(double a, double b) { return a + b > 0.0 ? 2.0 * a * b / (a + b) : 0.0; }

double percentile(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

// Distances from the surface voxels of `from` to the nearest surface voxel of `to`.
void surface_distances(const BinaryMask& from_surface, const BinaryMask& to_surface, std::vector<double>& out) {
  const std::vector<double> sq =
      squared_distance_to_sites(to_surface.dims(), to_surface.spacing(), to_surface.data());
  const auto bits = from_surface.data();
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) out.push_back(std::sqrt(sq[i]));
  }
}

}  // namespace

double dice(const BinaryMask& pred, const BinaryMask& ref) {
  require_same_grid(pred, ref, "dice");
  const std::int64_t p = count_foreground(pred), r = count_foreground(ref);
  if (p + r == 0) return 1.0;
  return 2.0 * static_cast<double>(overlap(pred, ref)) / static_cast<double>(p + r);
}

ClDiceParts cl_dice_from_skeletons(const BinaryMask& pred, const BinaryMask& ref, const BinaryMask& pred_skeleton,
                                   const BinaryMask& ref_skeleton) {
  require_same_grid(pred, ref, "cl_dice");
  require_same_grid(pred, pred_skeleton, "cl_dice");
  require_same_grid(ref, ref_skeleton, "cl_dice");
  const std::int64_t sp = count_foreground(pred_skeleton), sr = count_foreground(ref_skeleton);
  ClDiceParts out;
  if (sp == 0 && sr == 0) return {1.0, 1.0, 1.0};
  if (sp == 0 || sr == 0) return out;
  out.precision = static_cast<double>(overlap(pred_skeleton, ref)) / static_cast<double>(sp);
  out.sensitivity = static_cast<double>(overlap(ref_skeleton, pred)) / static_cast<double>(sr);
  out.cldice = harmonic(out.precision, out.sensitivity);
  return out;
}

ClDiceParts cl_dice(const BinaryMask& pred, const BinaryMask& ref, const SkeletonParams& params) {
  require_same_grid(pred, ref, "cl_dice");
  return cl_dice_from_skeletons(pred, ref, skeletonize(pred, params).mask, skeletonize(ref, params).mask);
}

BinaryMask boundary_voxels(const BinaryMask& mask) {
  const Dims& d = mask.dims();
  std::vector<std::uint8_t> out(static_cast<std::size_t>(d.size()), 0);
  const auto steps = face_steps(mask.spacing());
  for (std::int64_t z = 0; z < d.nz; ++z)
    for (std::int64_t y = 0; y < d.ny; ++y)
      for (std::int64_t x = 0; x < d.nx; ++x) {
        if (!mask.at(x, y, z)) continue;
        for (const NeighborStep& st : steps) {
          const std::int64_t nx = x + st.dx, ny = y + st.dy, nz = z + st.dz;
          if (!d.contains(nx, ny, nz) || !mask.at(nx, ny, nz)) {
            out[d.index(x, y, z)] = 1;
            break;
          }
        }
      }
  return BinaryMask(d, mask.spacing(), std::move(out));
}

std::optional<double> hd95(const BinaryMask& pred, const BinaryMask& ref) {
  require_same_grid(pred, ref, "hd95");
  if (count_foreground(pred) == 0 || count_foreground(ref) == 0) return std::nullopt;
  const BinaryMask sp = boundary_voxels(pred), sr = boundary_voxels(ref);
  std::vector<double> pooled;
  surface_distances(sp, sr, pooled);
  surface_distances(sr, sp, pooled);
  return percentile(std::move(pooled), 0.95);
}

std::int64_t betti0_error(const BinaryMask& pred, const BinaryMask& ref) {
  if (pred.dims() != ref.dims()) throw DimsMismatchError("betti0_error: dims differ");
  return std::abs(static_cast<std::int64_t>(count_components(pred)) - count_components(ref));
}

MetricsReport evaluate(const LabelVolume& pred, const LabelVolume& ref, const SkeletonParams& skeleton_params) {
  require_same_grid(pred, ref, "evaluate");
  MetricsReport report;
  const std::vector<Label> ref_classes = present_classes(ref);
  for (const Label c : present_classes(pred)) {
    if (!std::binary_search(ref_classes.begin(), ref_classes.end(), c)) report.absent_in_ref.push_back(c);
  }

  double hd_sum = 0.0;
  int hd_n = 0;
  for (const Label c : ref_classes) {
    const ClassMask p = extract_class(pred, c);
    const BinaryMask r = extract_class(ref, c).mask;
    ClassMetrics m;
    m.absent_in_pred = p.absent;
    if (p.absent) report.absent_in_pred.push_back(c);
    m.dice = dice(p.mask, r);
    m.cldice = cl_dice(p.mask, r, skeleton_params).cldice;
    m.hd95 = hd95(p.mask, r);
    m.betti0_error = betti0_error(p.mask, r);
    if (m.hd95) {
      hd_sum += *m.hd95;
      ++hd_n;
    }
    report.mean_dice += m.dice;
    report.mean_cldice += m.cldice;
    report.mean_betti0_error += static_cast<double>(m.betti0_error);
    report.per_class.emplace(c, m);
  }
  if (!report.per_class.empty()) {
    const auto n = static_cast<double>(report.per_class.size());
    report.mean_dice /= n;
    report.mean_cldice /= n;
    report.mean_betti0_error /= n;
  }
  if (hd_n > 0) report.mean_hd95 = hd_sum / hd_n;
  return report;
}

CenterlineFidelity centerline_fidelity(const BinaryMask& skeleton, const std::vector<Polyline>& centerline) {
  std::vector<Point> skel;
  const Dims& d = skeleton.dims();
  for (std::int64_t i = 0; i < d.size(); ++i) {
    if (skeleton[i]) skel.push_back(center_of(d.voxel(i), skeleton.spacing()));
  }
  std::size_t samples = 0;
  for (const Polyline& l : centerline) samples += l.size();
  if (skel.empty() || samples == 0) throw PreconditionError("centerline_fidelity needs a non-empty skeleton and centerline");

  CenterlineFidelity out;
  for (const Point& p : skel) {
    double best = std::numeric_limits<double>::infinity();
    for (const Polyline& l : centerline) best = std::min(best, distance_to_polyline(p, l));
    out.mean_dist += best;
    out.max_dist = std::max(out.max_dist, best);
  }
  out.mean_dist /= static_cast<double>(skel.size());

  const double reach = 2.0 * skeleton.spacing().diagonal();
  std::size_t covered = 0;
  for (const Polyline& l : centerline) {
    for (const Point& q : l) {
      const bool hit = std::any_of(skel.begin(), skel.end(), [&](const Point& s) { return distance(s, q) <= reach; });
      covered += hit ? 1 : 0;
    }
  }
  out.coverage = static_cast<double>(covered) / static_cast<double>(samples);
  return out;
}

}  // namespace sas
