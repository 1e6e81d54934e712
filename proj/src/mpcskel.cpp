#include "sas/mpcskel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <unordered_map>

#include "sas/components.hpp"

namespace sas {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using HeapEntry = std::pair<double, std::int64_t>;
using MinHeap = std::priority_queue<HeapEntry, std::vector<HeapEntry>, std::greater<>>;

struct Offset {
  std::int64_t dx, dy, dz;
};

/// Voxel offsets within a physical radius, cached per radius rounded to 1 um.
class SphereCache {
 public:
  explicit SphereCache(const Spacing& spacing) : spacing_(spacing) {}

  const std::vector<Offset>& offsets(double radius) {
    const auto key = static_cast<std::int64_t>(std::llround(radius * 1000.0));
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    const double r = static_cast<double>(key) / 1000.0;
    const double r2 = r * r;
    std::vector<Offset> out;
    const auto ext = [&](double s) { return static_cast<std::int64_t>(std::floor(r / s)); };
    const std::int64_t ex = ext(spacing_.x), ey = ext(spacing_.y), ez = ext(spacing_.z);
    for (std::int64_t dz = -ez; dz <= ez; ++dz)
      for (std::int64_t dy = -ey; dy <= ey; ++dy)
        for (std::int64_t dx = -ex; dx <= ex; ++dx) {
          const double px = static_cast<double>(dx) * spacing_.x;
          const double py = static_cast<double>(dy) * spacing_.y;
          const double pz = static_cast<double>(dz) * spacing_.z;
          if (px * px + py * py + pz * pz <= r2) out.push_back({dx, dy, dz});
        }
    return cache_.emplace(key, std::move(out)).first->second;
  }

 private:
  Spacing spacing_;
  std::unordered_map<std::int64_t, std::vector<Offset>> cache_;
};

/// Skeletonization of one connected component inside its bounding box,
/// padded by one voxel so neighbor lookups never leave the grid.
class ComponentTracer {
 public:
  ComponentTracer(Dims dims, Spacing spacing, std::vector<std::uint8_t> inside, std::vector<double> dist,
                  const SkeletonParams& params, SphereCache& spheres)
      : dims_(dims),
        spacing_(spacing),
        inside_(std::move(inside)),
        dist_(std::move(dist)),
        params_(params),
        spheres_(spheres) {
    for (const NeighborStep& s : neighbor_steps(spacing_)) {
      steps_.push_back({static_cast<std::int64_t>(s.dx) + dims_.nx * (s.dy + dims_.ny * s.dz), s.length});
    }
  }

  /// Returns kept paths and stubs in local coordinates.
  std::pair<std::vector<SkeletonPath>, std::vector<SkeletonPath>> run() {
    const auto n = static_cast<std::size_t>(dims_.size());
    double max_dist = 0.0;
    std::int64_t remaining = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!inside_[i]) continue;
      ++remaining;
      max_dist = std::max(max_dist, dist_[i]);
    }
    if (!(max_dist > 0.0)) throw DegenerateShapeError("maximum distance is zero; cost field undefined");
    const std::int64_t anchor = central_maximizer(max_dist);

    cost_.assign(n, kInf);
    for (std::size_t i = 0; i < n; ++i) {
      if (inside_[i]) cost_[i] = cost_value(dist_[i], max_dist, params_.cost);
    }

    // Endpoint candidates grouped by equal cost, most expensive group first.
    std::vector<std::int64_t> order;
    order.reserve(static_cast<std::size_t>(remaining));
    for (std::size_t i = 0; i < n; ++i) {
      if (inside_[i]) order.push_back(static_cast<std::int64_t>(i));
    }
    std::stable_sort(order.begin(), order.end(), [&](std::int64_t a, std::int64_t b) { return cost_[a] > cost_[b]; });

    visited_.assign(n, 0);
    on_skeleton_.assign(n, 0);
    touching_.assign(n, 0);
    to_skel_cost_.assign(n, kInf);
    next_.assign(n, -1);
    graph_dist_.assign(n, kInf);

    on_skeleton_[anchor] = 1;
    grow_cost_tree({anchor});
    grow_graph_distance({anchor});

    std::vector<SkeletonPath> kept, stubs;
    std::size_t group_begin = 0;
    bool first = true;
    while (remaining > 0) {
      while (group_begin < order.size() && visited_[order[group_begin]]) ++group_begin;
      // Pick the unvisited voxel of the top cost group that is farthest
      // (by graph distance) from the reference set.
      std::int64_t endpoint = -1;
      const double top_cost = cost_[order[group_begin]];
      for (std::size_t k = group_begin; k < order.size() && cost_[order[k]] == top_cost; ++k) {
        const std::int64_t v = order[k];
        if (visited_[v]) continue;
        if (endpoint < 0 || graph_dist_[v] > graph_dist_[endpoint] ||
            (graph_dist_[v] == graph_dist_[endpoint] && v < endpoint)) {
          endpoint = v;
        }
      }

      SkeletonPath path = extract(endpoint);
      const bool stub = params_.suppress_stubs && !first && path.length < params_.radius.beta;
      remaining -= mark(path);
      if (stub) {
        stubs.push_back(std::move(path));
        continue;
      }
      std::vector<std::int64_t> added, sources;
      for (const Voxel& v : path.voxels) {
        const std::int64_t i = dims_.index(v);
        if (!on_skeleton_[i]) {
          on_skeleton_[i] = 1;
          added.push_back(i);
          sources.push_back(i);
        }
      }
      for (const Voxel& v : path.voxels) {
        const std::int64_t i = dims_.index(v);
        for (const Step& st : steps_) {
          const std::int64_t j = i + st.delta;
          if (inside_[j] && !on_skeleton_[j] && !touching_[j]) {
            touching_[j] = 1;
            sources.push_back(j);
          }
        }
      }
      grow_cost_tree(sources);
      if (params_.tie_break == EndpointTieBreak::farthest_from_skeleton) grow_graph_distance(added);
      kept.push_back(std::move(path));
      first = false;
    }
    thin_junctions(kept);
    return {std::move(kept), std::move(stubs)};
  }

 private:
  struct Step {
    std::int64_t delta;
    double length;
  };

  // Minimum cost from every voxel to the skeleton or a voxel touching it,
  // paying C of each voxel entered. Incremental: new skeleton voxels and
  // their neighbors are added as zero-cost sources and only improvements
  // propagate.
  void grow_cost_tree(const std::vector<std::int64_t>& sources) {
    MinHeap heap;
    for (const std::int64_t s : sources) {
      to_skel_cost_[s] = 0.0;
      next_[s] = -1;
      heap.emplace(0.0, s);
    }
    while (!heap.empty()) {
      const auto [g, u] = heap.top();
      heap.pop();
      if (g > to_skel_cost_[u]) continue;
      for (const Step& st : steps_) {
        const std::int64_t v = u + st.delta;
        if (!inside_[v]) continue;
        const double cand = g + cost_[u] * st.length;
        if (cand < to_skel_cost_[v]) {
          to_skel_cost_[v] = cand;
          next_[v] = u;
          heap.emplace(cand, v);
        }
      }
    }
  }

  void grow_graph_distance(const std::vector<std::int64_t>& sources) {
    MinHeap heap;
    for (const std::int64_t s : sources) {
      graph_dist_[s] = 0.0;
      heap.emplace(0.0, s);
    }
    while (!heap.empty()) {
      const auto [g, u] = heap.top();
      heap.pop();
      if (g > graph_dist_[u]) continue;
      for (const Step& st : steps_) {
        const std::int64_t v = u + st.delta;
        if (!inside_[v]) continue;
        const double cand = g + st.length;
        if (cand < graph_dist_[v]) {
          graph_dist_[v] = cand;
          heap.emplace(cand, v);
        }
      }
    }
  }

  SkeletonPath extract(std::int64_t endpoint) const {
    SkeletonPath path;
    path.cost = to_skel_cost_[endpoint];
    std::int64_t cur = endpoint;
    for (;;) {
      const Voxel v = dims_.voxel(cur);
      if (!path.voxels.empty()) path.length += distance(center_of(path.voxels.back(), spacing_), center_of(v, spacing_));
      path.voxels.push_back(v);
      path.radii.push_back(params_.radius.radius(dist_[cur]));
      if (on_skeleton_[cur] || touching_[cur]) break;
      cur = next_[cur];
    }
    return path;
  }

  // The Dist maximizer nearest the centroid of all maximizers (lowest
  // index on ties), so a plateau along a tube anchors mid-tube.
  std::int64_t central_maximizer(double max_dist) const {
    std::vector<std::int64_t> tied;
    double cx = 0.0, cy = 0.0, cz = 0.0;
    for (std::size_t i = 0; i < inside_.size(); ++i) {
      if (!inside_[i] || dist_[i] != max_dist) continue;
      const Voxel v = dims_.voxel(static_cast<std::int64_t>(i));
      cx += static_cast<double>(v.x);
      cy += static_cast<double>(v.y);
      cz += static_cast<double>(v.z);
      tied.push_back(static_cast<std::int64_t>(i));
    }
    const auto count = static_cast<double>(tied.size());
    cx /= count;
    cy /= count;
    cz /= count;
    std::int64_t best = tied.front();
    double best_d = std::numeric_limits<double>::infinity();
    for (const std::int64_t i : tied) {
      const Voxel v = dims_.voxel(i);
      const double dx = (static_cast<double>(v.x) - cx) * spacing_.x;
      const double dy = (static_cast<double>(v.y) - cy) * spacing_.y;
      const double dz = (static_cast<double>(v.z) - cz) * spacing_.z;
      const double d = dx * dx + dy * dy + dz * dz;
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    return best;
  }

  static bool adjacent(const Voxel& a, const Voxel& b) {
    return a != b && std::abs(a.x - b.x) <= 1 && std::abs(a.y - b.y) <= 1 && std::abs(a.z - b.z) <= 1;
  }

  static bool connected(const std::vector<Voxel>& set) {
    if (set.empty()) return true;
    std::vector<std::uint8_t> seen(set.size(), 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    std::size_t reached = 1;
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      for (std::size_t j = 0; j < set.size(); ++j) {
        if (!seen[j] && adjacent(set[i], set[j])) {
          seen[j] = 1;
          ++reached;
          stack.push_back(j);
        }
      }
    }
    return reached == set.size();
  }

  // Removes redundant interior path voxels so that junctions and corners
  // are one voxel thick. An interior voxel v with path neighbors a and b
  // goes when a and b are adjacent, or is replaced by another path's end
  // voxel adjacent to both; either way only if v's remaining skeleton
  // neighbors stay 26-connected. Path ends are never touched.
  void thin_junctions(std::vector<SkeletonPath>& paths) const {
    std::vector<std::uint16_t> refs(static_cast<std::size_t>(dims_.size()), 0);
    std::vector<std::uint8_t> is_end(static_cast<std::size_t>(dims_.size()), 0);
    for (const SkeletonPath& p : paths) {
      for (const Voxel& v : p.voxels) ++refs[dims_.index(v)];
      is_end[dims_.index(p.voxels.front())] = 1;
      is_end[dims_.index(p.voxels.back())] = 1;
    }
    const auto neighbors = [&](const Voxel& v) {
      std::vector<Voxel> out;
      const std::int64_t i = dims_.index(v);
      for (const Step& st : steps_) {
        if (refs[i + st.delta] > 0) out.push_back(dims_.voxel(i + st.delta));
      }
      return out;
    };

    bool changed = true;
    while (changed) {
      changed = false;
      for (SkeletonPath& p : paths) {
        if (p.voxels.size() < 3) continue;
        std::vector<Voxel> out{p.voxels.front()};
        std::vector<double> radii{p.radii.front()};
        for (std::size_t k = 1; k + 1 < p.voxels.size(); ++k) {
          const Voxel v = p.voxels[k];
          const std::int64_t vi = dims_.index(v);
          const Voxel& a = out.back();
          const Voxel& b = p.voxels[k + 1];
          std::optional<Voxel> replacement;
          bool removable = false;
          if (refs[vi] == 1 && !is_end[vi]) {
            std::vector<Voxel> rest = neighbors(v);
            if (adjacent(a, b)) {
              removable = connected(rest);
            } else {
              for (const Voxel& w : rest) {
                const std::int64_t wi = dims_.index(w);
                if (!is_end[wi] || w == a || w == b || !adjacent(w, a) || !adjacent(w, b)) continue;
                if (std::find(p.voxels.begin(), p.voxels.end(), w) != p.voxels.end()) continue;
                if (connected(rest)) {
                  replacement = w;
                  removable = true;
                }
                break;
              }
            }
          }
          if (!removable) {
            out.push_back(v);
            radii.push_back(p.radii[k]);
            continue;
          }
          --refs[vi];
          changed = true;
          if (replacement) {
            ++refs[dims_.index(*replacement)];
            out.push_back(*replacement);
            radii.push_back(params_.radius.radius(dist_[dims_.index(*replacement)]));
          }
        }
        out.push_back(p.voxels.back());
        radii.push_back(p.radii.back());
        p.voxels = std::move(out);
        p.radii = std::move(radii);
      }
    }
    for (SkeletonPath& p : paths) {
      p.length = 0.0;
      for (std::size_t k = 1; k < p.voxels.size(); ++k) {
        p.length += distance(center_of(p.voxels[k - 1], spacing_), center_of(p.voxels[k], spacing_));
      }
    }
  }

  // Marks the spheres around every path voxel; returns newly visited count.
  std::int64_t mark(const SkeletonPath& path) {
    std::int64_t newly = 0;
    for (std::size_t k = 0; k < path.voxels.size(); ++k) {
      const Voxel& c = path.voxels[k];
      for (const Offset& o : spheres_.offsets(path.radii[k])) {
        const std::int64_t x = c.x + o.dx, y = c.y + o.dy, z = c.z + o.dz;
        if (!dims_.contains(x, y, z)) continue;
        const std::int64_t i = dims_.index(x, y, z);
        if (inside_[i] && !visited_[i]) {
          visited_[i] = 1;
          ++newly;
        }
      }
    }
    return newly;
  }

  Dims dims_;
  Spacing spacing_;
  std::vector<std::uint8_t> inside_;
  std::vector<double> dist_;
  SkeletonParams params_;
  SphereCache& spheres_;
  std::vector<Step> steps_;

  std::vector<double> cost_;
  std::vector<std::uint8_t> visited_;
  std::vector<std::uint8_t> on_skeleton_;
  std::vector<std::uint8_t> touching_;  ///< 26-adjacent to the skeleton
  std::vector<double> to_skel_cost_;
  std::vector<std::int64_t> next_;
  std::vector<double> graph_dist_;
};

struct Box {
  Voxel lo{std::numeric_limits<std::int64_t>::max(), std::numeric_limits<std::int64_t>::max(),
           std::numeric_limits<std::int64_t>::max()};
  Voxel hi{-1, -1, -1};

  void add(const Voxel& v) {
    lo = {std::min(lo.x, v.x), std::min(lo.y, v.y), std::min(lo.z, v.z)};
    hi = {std::max(hi.x, v.x), std::max(hi.y, v.y), std::max(hi.z, v.z)};
  }
};

Voxel shift(const Voxel& v, const Voxel& by) { return {v.x + by.x, v.y + by.y, v.z + by.z}; }

}  // namespace

void RadiusParams::validate() const {
  if (!(alpha2 >= 0.0) || !(beta >= 0.0) || (alpha2 == 0.0 && beta == 0.0)) {
    throw PreconditionError("radius parameters need alpha2 >= 0, beta >= 0, not both zero");
  }
}

RadiusParams RadiusParams::in_spacing_max(double alpha2_mult, double beta_mult, const Spacing& spacing) {
  return {alpha2_mult * spacing.max(), beta_mult * spacing.max()};
}

double CostField::at(std::int64_t index) const { return passable[index] ? values[index] : kInf; }

CostField cost_field(const DistanceField& dist, const CostParams& params) {
  if (!(params.alpha1 > 0.0) || !(params.gamma > 0.0)) throw PreconditionError("alpha1 and gamma must be positive");
  if (!(dist.max_dist > 0.0)) throw DegenerateShapeError("maximum distance is zero; cost field undefined");
  const auto d = dist.field.data();
  std::vector<double> values(d.size(), 0.0);
  std::vector<std::uint8_t> passable(d.size(), 0);
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] > 0.0) {
      values[i] = cost_value(d[i], dist.max_dist, params);
      passable[i] = 1;
    }
  }
  const Dims& dims = dist.field.dims();
  const Spacing& sp = dist.field.spacing();
  return {ScalarVolume(dims, sp, std::move(values)), BinaryMask(dims, sp, std::move(passable)), params,
          dist.max_dist};
}

SkeletonPath trace_path(const CostField& cost, const Voxel& start, const VoxelPredicate& is_target) {
  const Dims& dims = cost.values.dims();
  const Spacing& spacing = cost.values.spacing();
  if (!dims.contains(start) || !cost.passable.at(start)) throw PreconditionError("trace_path: start is outside the shape");

  const auto n = static_cast<std::size_t>(dims.size());
  std::vector<double> best(n, kInf);
  std::vector<std::int64_t> parent(n, -1);
  std::vector<std::uint8_t> settled(n, 0);
  const auto steps = neighbor_steps(spacing);

  MinHeap heap;
  const std::int64_t s = dims.index(start);
  best[s] = 0.0;
  heap.emplace(0.0, s);
  std::int64_t hit = -1;
  while (!heap.empty()) {
    const auto [g, u] = heap.top();
    heap.pop();
    if (settled[u]) continue;
    settled[u] = 1;
    const Voxel uv = dims.voxel(u);
    if (is_target(uv)) {
      hit = u;
      break;
    }
    for (const NeighborStep& st : steps) {
      const std::int64_t x = uv.x + st.dx, y = uv.y + st.dy, z = uv.z + st.dz;
      if (!dims.contains(x, y, z)) continue;
      const std::int64_t v = dims.index(x, y, z);
      if (!cost.passable[v] || settled[v]) continue;
      const double cand = g + cost.values[v] * st.length;
      if (cand < best[v]) {
        best[v] = cand;
        parent[v] = u;
        heap.emplace(cand, v);
      }
    }
  }
  if (hit < 0) {
    throw UnreachableTargetError("no target reachable from voxel (" + std::to_string(start.x) + "," +
                                 std::to_string(start.y) + "," + std::to_string(start.z) +
                                 "): its connected component holds no target voxel");
  }

  std::vector<std::int64_t> chain;
  for (std::int64_t v = hit; v >= 0; v = parent[v]) chain.push_back(v);
  std::reverse(chain.begin(), chain.end());
  SkeletonPath path;
  path.cost = best[hit];
  for (const std::int64_t v : chain) {
    const Voxel vox = dims.voxel(v);
    if (!path.voxels.empty()) path.length += distance(center_of(path.voxels.back(), spacing), center_of(vox, spacing));
    path.voxels.push_back(vox);
  }
  return path;
}

Skeleton skeletonize(const BinaryMask& shape, const SkeletonParams& params, Label class_id) {
  params.radius.validate();
  if (!(params.cost.alpha1 > 0.0) || !(params.cost.gamma > 0.0)) {
    throw PreconditionError("alpha1 and gamma must be positive");
  }
  const Dims& dims = shape.dims();
  const Spacing& spacing = shape.spacing();
  Skeleton out{{}, {}, BinaryMask::filled(dims, spacing), class_id, params};
  if (count_foreground(shape) == 0) return out;

  const DistanceField dist = distance_transform(shape);
  const Components comps = label_components(shape);

  std::vector<Box> boxes(static_cast<std::size_t>(comps.count));
  for (std::int64_t i = 0; i < dims.size(); ++i) {
    if (comps.labels[i] > 0) boxes[comps.labels[i] - 1].add(dims.voxel(i));
  }

  SphereCache spheres(spacing);
  std::vector<std::uint8_t> skel(static_cast<std::size_t>(dims.size()), 0);
  for (std::int32_t c = 1; c <= comps.count; ++c) {
    const Box& box = boxes[c - 1];
    const Voxel origin{box.lo.x - 1, box.lo.y - 1, box.lo.z - 1};
    const Dims local{box.hi.x - box.lo.x + 3, box.hi.y - box.lo.y + 3, box.hi.z - box.lo.z + 3};
    std::vector<std::uint8_t> inside(static_cast<std::size_t>(local.size()), 0);
    std::vector<double> ldist(static_cast<std::size_t>(local.size()), 0.0);
    for (std::int64_t z = box.lo.z; z <= box.hi.z; ++z)
      for (std::int64_t y = box.lo.y; y <= box.hi.y; ++y)
        for (std::int64_t x = box.lo.x; x <= box.hi.x; ++x) {
          const std::int64_t g = dims.index(x, y, z);
          if (comps.labels[g] != c) continue;
          const std::int64_t l = local.index(x - origin.x, y - origin.y, z - origin.z);
          inside[l] = 1;
          ldist[l] = dist.field[g];
        }

    ComponentTracer tracer(local, spacing, std::move(inside), std::move(ldist), params, spheres);
    auto [kept, stubs] = tracer.run();
    for (auto* group : {&kept, &stubs}) {
      for (SkeletonPath& p : *group) {
        for (Voxel& v : p.voxels) v = shift(v, origin);
      }
    }
    for (const SkeletonPath& p : kept) {
      for (const Voxel& v : p.voxels) skel[dims.index(v)] = 1;
    }
    std::move(kept.begin(), kept.end(), std::back_inserter(out.paths));
    std::move(stubs.begin(), stubs.end(), std::back_inserter(out.stubs));
  }
  out.mask = BinaryMask(dims, spacing, std::move(skel));
  return out;
}

MulticlassSkeleton skeletonize_multiclass(const LabelVolume& vol, const SkeletonParams& global,
                                          const std::map<Label, SkeletonParams>& per_class) {
  MulticlassSkeleton out;
  const std::vector<Label> classes = present_classes(vol);
  if (classes.empty()) throw EmptyShapeError("no foreground class present");
  for (const auto& [label, p] : per_class) {
    if (!std::binary_search(classes.begin(), classes.end(), label)) {
      out.warnings.push_back("class " + std::to_string(label) + " is absent; skipped");
    }
  }
  for (const Label c : classes) {
    const auto it = per_class.find(c);
    const SkeletonParams& params = it == per_class.end() ? global : it->second;
    out.classes.emplace(c, skeletonize(extract_class(vol, c).mask, params, c));
  }
  return out;
}

WeightMode weight_mode_from_string(const std::string& name) {
  if (name == "binary") return WeightMode::binary;
  if (name == "distance_decay" || name == "distance-decay") return WeightMode::distance_decay;
  if (name == "sphere_dilated" || name == "sphere-dilated") return WeightMode::sphere_dilated;
  throw PreconditionError("unknown weight mode '" + name + "' (expected binary, distance-decay or sphere-dilated)");
}

std::string to_string(WeightMode mode) {
  switch (mode) {
    case WeightMode::binary: return "binary";
    case WeightMode::distance_decay: return "distance_decay";
    case WeightMode::sphere_dilated: return "sphere_dilated";
  }
  return "?";
}

ScalarVolume weight_map(const Skeleton& skeleton, const BinaryMask& shape, WeightMode mode, double tau) {
  require_same_grid(skeleton.mask, shape, "weight_map");
  const Dims& dims = shape.dims();
  const Spacing& spacing = shape.spacing();
  const auto skel = skeleton.mask.data();
  const auto inside = shape.data();
  std::vector<double> w(skel.size(), 0.0);

  switch (mode) {
    case WeightMode::binary:
      for (std::size_t i = 0; i < w.size(); ++i) w[i] = skel[i] ? 1.0 : 0.0;
      break;
    case WeightMode::distance_decay: {
      if (!(tau > 0.0)) throw PreconditionError("tau must be positive");
      if (std::none_of(skel.begin(), skel.end(), [](std::uint8_t b) { return b != 0; })) break;
      const std::vector<double> sq = squared_distance_to_sites(dims, spacing, skel);
      for (std::size_t i = 0; i < w.size(); ++i) {
        if (inside[i] || skel[i]) w[i] = std::exp(-std::sqrt(sq[i]) / tau);
      }
      break;
    }
    case WeightMode::sphere_dilated: {
      SphereCache spheres(spacing);
      for (const SkeletonPath& p : skeleton.paths) {
        for (std::size_t k = 0; k < p.voxels.size(); ++k) {
          const Voxel& c = p.voxels[k];
          for (const Offset& o : spheres.offsets(p.radii.empty() ? 0.0 : p.radii[k])) {
            const std::int64_t x = c.x + o.dx, y = c.y + o.dy, z = c.z + o.dz;
            if (!dims.contains(x, y, z)) continue;
            const std::int64_t i = dims.index(x, y, z);
            if (inside[i]) w[i] = 1.0;
          }
        }
      }
      break;
    }
  }
  return ScalarVolume(dims, spacing, std::move(w));
}

ScalarVolume multiclass_weight_map(const MulticlassSkeleton& skel, const LabelVolume& vol, WeightMode mode,
                                   double tau) {
  std::vector<double> w(static_cast<std::size_t>(vol.size()), 0.0);
  for (const auto& [label, s] : skel.classes) {
    const ScalarVolume m = weight_map(s, extract_class(vol, label).mask, mode, tau);
    const auto d = m.data();
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::max(w[i], d[i]);
  }
  return ScalarVolume(vol.dims(), vol.spacing(), std::move(w));
}

LabelVolume skeleton_labels(const MulticlassSkeleton& skel, const Dims& dims, const Spacing& spacing) {
  std::vector<Label> out(static_cast<std::size_t>(dims.size()), kBackground);
  for (const auto& [label, s] : skel.classes) {
    require_same_grid(s.mask, BinaryMask::filled(dims, spacing), "skeleton_labels");
    const auto bits = s.mask.data();
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (bits[i] && out[i] == kBackground) out[i] = label;
    }
  }
  return LabelVolume(dims, spacing, std::move(out));
}

}  // namespace sas
