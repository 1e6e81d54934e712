#include "sas/phantoms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace sas {

namespace {

struct Vec {
  double x, y, z;
};
Vec operator+(Vec a, Vec b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
Vec operator-(Vec a, Vec b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
Vec operator*(double s, Vec a) { return {s * a.x, s * a.y, s * a.z}; }
double dot(Vec a, Vec b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
Vec cross(Vec a, Vec b) { return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x}; }
double norm(Vec a) { return std::sqrt(dot(a, a)); }
Vec unit(Vec a) { return (1.0 / norm(a)) * a; }
Vec as_vec(const Point& p) { return {p.x, p.y, p.z}; }
Point as_point(Vec v) { return {v.x, v.y, v.z}; }

/// Rotates v about the unit axis k by angle (Rodrigues).
Vec rotate(Vec v, Vec k, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return c * v + s * cross(k, v) + ((1.0 - c) * dot(k, v)) * k;
}

/// One tube piece: a polyline with a radius; free ends get flat caps.
struct Tube {
  Label label = 1;
  Polyline line;
  double radius = 1.0;
  bool free_start = true;
  bool free_end = true;
};

double seg_param(Vec p, Vec a, Vec b) {
  const Vec ab = b - a;
  const double len2 = dot(ab, ab);
  return len2 == 0.0 ? 0.0 : dot(p - a, ab) / len2;
}

bool inside_tube(Vec p, const Tube& t) {
  const std::size_t segs = t.line.size() - 1;
  const double r2 = t.radius * t.radius;
  if (segs == 0) {
    const Vec d = p - as_vec(t.line.front());
    return dot(d, d) <= r2;
  }
  // Nearest point on the line; flat caps exclude points whose nearest
  // point is a free end approached from beyond it.
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_seg = 0;
  double best_u = 0.0;
  for (std::size_t i = 0; i < segs; ++i) {
    const Vec a = as_vec(t.line[i]), b = as_vec(t.line[i + 1]);
    const double u = seg_param(p, a, b);
    const Vec d = p - (a + std::clamp(u, 0.0, 1.0) * (b - a));
    const double dd = dot(d, d);
    if (dd < best) {
      best = dd;
      best_seg = i;
      best_u = u;
    }
  }
  if (best > r2) return false;
  if (t.free_start && best_seg == 0 && best_u < 0.0) return false;
  if (t.free_end && best_seg + 1 == segs && best_u > 1.0) return false;
  return true;
}

/// Samples a segment at intervals of at most `step`, excluding its start.
void append_segment(Polyline& line, Point to, double step) {
  const Vec a = as_vec(line.back()), b = as_vec(to);
  const double len = norm(b - a);
  const auto n = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(len / step)));
  for (std::int64_t k = 1; k <= n; ++k) line.push_back(as_point(a + (static_cast<double>(k) / n) * (b - a)));
}

Polyline sampled_segment(Point from, Point to, double step) {
  Polyline line{from};
  append_segment(line, to, step);
  return line;
}

// Center of the grid's central voxel, so centered shapes sit on the lattice.
Vec grid_center(const PhantomSpec& s) {
  const auto mid = [](std::int64_t n, double h) { return static_cast<double>((n - 1) / 2) * h; };
  return {mid(s.dims.nx, s.spacing.x), mid(s.dims.ny, s.spacing.y), mid(s.dims.nz, s.spacing.z)};
}

void check_radii(const PhantomSpec& spec, const std::vector<Tube>& tubes) {
  for (const Tube& t : tubes) {
    if (t.radius < spec.spacing.max()) {
      throw PreconditionError("phantom radius " + std::to_string(t.radius) + " mm is below one voxel (" +
                              std::to_string(spec.spacing.max()) + " mm)");
    }
  }
}

// Rasterization clips at the grid edge, so any foreground voxel within two
// voxels of a face means the shape does not fit with the required margin.
void check_margin(const LabelVolume& vol) {
  const Dims& d = vol.dims();
  for (std::int64_t z = 0; z < d.nz; ++z)
    for (std::int64_t y = 0; y < d.ny; ++y)
      for (std::int64_t x = 0; x < d.nx; ++x) {
        if (vol.at(x, y, z) == kBackground) continue;
        const Voxel v{x, y, z};
        for (const Axis a : kAxes) {
          if (v[a] < 2 || v[a] > d.extent(a) - 3) {
            throw PreconditionError("phantom does not keep a 2-voxel background margin along " + to_string(a));
          }
        }
      }
}

LabelVolume rasterize(const PhantomSpec& spec, std::vector<Tube> tubes) {
  const Dims& d = spec.dims;
  const Spacing& s = spec.spacing;
  std::vector<Label> data(static_cast<std::size_t>(d.size()), kBackground);
  std::stable_sort(tubes.begin(), tubes.end(), [](const Tube& a, const Tube& b) { return a.label < b.label; });
  for (const Tube& t : tubes) {
    double lo[3] = {1e300, 1e300, 1e300}, hi[3] = {-1e300, -1e300, -1e300};
    for (const Point& p : t.line) {
      const double c[3] = {p.x, p.y, p.z};
      for (int k = 0; k < 3; ++k) {
        lo[k] = std::min(lo[k], c[k] - t.radius);
        hi[k] = std::max(hi[k], c[k] + t.radius);
      }
    }
    const auto first = [&](int k, double sp, std::int64_t n) {
      return std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor(lo[k] / sp)), 0, n - 1);
    };
    const auto last = [&](int k, double sp, std::int64_t n) {
      return std::clamp<std::int64_t>(static_cast<std::int64_t>(std::ceil(hi[k] / sp)), 0, n - 1);
    };
    for (std::int64_t z = first(2, s.z, d.nz); z <= last(2, s.z, d.nz); ++z)
      for (std::int64_t y = first(1, s.y, d.ny); y <= last(1, s.y, d.ny); ++y)
        for (std::int64_t x = first(0, s.x, d.nx); x <= last(0, s.x, d.nx); ++x) {
          const std::int64_t i = d.index(x, y, z);
          if (data[i] != kBackground && data[i] <= t.label) continue;
          if (inside_tube(as_vec(center_of({x, y, z}, s)), t)) data[i] = t.label;
        }
  }
  return LabelVolume(d, s, std::move(data));
}

// Keeps the points of each centerline that fall in a voxel of its own class.
void trim_to_own_class(Phantom& ph) {
  const Dims& d = ph.volume.dims();
  const Spacing& s = ph.volume.spacing();
  for (auto& [label, pieces] : ph.centerlines) {
    for (Polyline& line : pieces) {
      std::erase_if(line, [&](const Point& p) {
        const Voxel v{std::llround(p.x / s.x), std::llround(p.y / s.y), std::llround(p.z / s.z)};
        return !d.contains(v) || ph.volume.at(v) != label;
      });
    }
    std::erase_if(pieces, [](const Polyline& l) { return l.empty(); });
  }
}

struct TreeNode {
  Vec start, end, dir;
  double radius, length;
  int generation;
  Label label;
  Vec plane_normal;
};

std::vector<Tube> build_tree(const PhantomSpec& spec, double step, Phantom& ph) {
  if (spec.class_count < 1 || spec.class_count % 2 == 0) {
    throw PreconditionError("multiclass_tree class_count must be odd and positive");
  }
  std::mt19937_64 rng(spec.rng_seed);
  const auto jitter = [&] {
    // Portable uniform in [-1, 1).
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return (2.0 * u - 1.0) * spec.jitter_deg * std::numbers::pi / 180.0;
  };
  const double angle = spec.angle_deg * std::numbers::pi / 180.0;

  std::vector<TreeNode> nodes{{{0, 0, 0}, {0, 0, spec.length}, {0, 0, 1}, spec.radius, spec.length, 0, 1, {1, 0, 0}}};
  std::size_t split = 0;
  while (static_cast<int>(nodes.size()) < spec.class_count) {
    const TreeNode parent = nodes[split++];
    // Alternate the branching plane by 90 degrees per generation.
    const Vec normal = unit(rotate(parent.plane_normal, parent.dir, std::numbers::pi / 2.0 + jitter()));
    for (const double sign : {-1.0, 1.0}) {
      TreeNode child;
      child.dir = unit(rotate(parent.dir, normal, sign * angle));
      child.length = parent.length * spec.length_decay;
      child.radius = parent.radius * spec.radius_decay;
      child.start = parent.end;
      child.end = child.start + child.length * child.dir;
      child.generation = parent.generation + 1;
      child.label = static_cast<Label>(nodes.size() + 1);
      child.plane_normal = normal;
      nodes.push_back(child);
    }
  }

  // Center the bounding box of the tree in the grid.
  Vec lo{1e300, 1e300, 1e300}, hi{-1e300, -1e300, -1e300};
  for (const TreeNode& n : nodes) {
    for (const Vec p : {n.start, n.end}) {
      lo = {std::min(lo.x, p.x - n.radius), std::min(lo.y, p.y - n.radius), std::min(lo.z, p.z - n.radius)};
      hi = {std::max(hi.x, p.x + n.radius), std::max(hi.y, p.y + n.radius), std::max(hi.z, p.z + n.radius)};
    }
  }
  const Vec shift = grid_center(spec) - 0.5 * (lo + hi);

  std::vector<bool> has_children(nodes.size(), false);
  for (std::size_t i = 0; i < split; ++i) has_children[i] = true;
  std::vector<Tube> tubes;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const TreeNode& n = nodes[i];
    const Point a = as_point(n.start + shift), b = as_point(n.end + shift);
    tubes.push_back({n.label, sampled_segment(a, b, step), n.radius, i == 0, !has_children[i]});
    ph.centerlines[n.label].push_back(tubes.back().line);
    if (has_children[i]) {
      ph.bifurcations[n.label].push_back(b);
    } else {
      ph.terminals[n.label].push_back(b);
    }
  }
  return tubes;
}

}  // namespace

std::string to_string(PhantomKind kind) {
  switch (kind) {
    case PhantomKind::cylinder: return "cylinder";
    case PhantomKind::torus: return "torus";
    case PhantomKind::y_branch: return "y_branch";
    case PhantomKind::ball: return "ball";
    case PhantomKind::helix: return "helix";
    case PhantomKind::multiclass_tree: return "multiclass_tree";
  }
  return "?";
}

PhantomKind phantom_kind_from_string(const std::string& name) {
  for (const PhantomKind k : {PhantomKind::cylinder, PhantomKind::torus, PhantomKind::y_branch, PhantomKind::ball,
                              PhantomKind::helix, PhantomKind::multiclass_tree}) {
    if (to_string(k) == name) return k;
  }
  throw PreconditionError("unknown phantom kind '" + name + "'");
}

double distance_to_polyline(const Point& p, const Polyline& line) {
  if (line.empty()) throw PreconditionError("distance_to_polyline: empty polyline");
  const Vec q = as_vec(p);
  if (line.size() == 1) return norm(q - as_vec(line.front()));
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < line.size(); ++i) {
    const Vec a = as_vec(line[i]), b = as_vec(line[i + 1]);
    const Vec c = a + std::clamp(seg_param(q, a, b), 0.0, 1.0) * (b - a);
    best = std::min(best, norm(q - c));
  }
  return best;
}

Phantom generate(const PhantomSpec& spec) {
  validate_geometry(spec.dims, spec.spacing);
  const double step = 0.5 * spec.spacing.min();
  const Vec c = grid_center(spec);
  const double pi = std::numbers::pi;
  Phantom ph{LabelVolume::filled(spec.dims, spec.spacing), {}, {}, {}};
  std::vector<Tube> tubes;

  switch (spec.kind) {
    case PhantomKind::cylinder: {
      Vec dir{0, 0, 0};
      (spec.axis == Axis::x ? dir.x : (spec.axis == Axis::y ? dir.y : dir.z)) = 1.0;
      const Point a = as_point(c - (0.5 * spec.length) * dir), b = as_point(c + (0.5 * spec.length) * dir);
      tubes.push_back({1, sampled_segment(a, b, step), spec.radius, true, true});
      ph.terminals[1] = {a, b};
      break;
    }
    case PhantomKind::ball: {
      tubes.push_back({1, {as_point(c)}, spec.radius, false, false});
      break;
    }
    case PhantomKind::torus: {
      const double circumference = 2.0 * pi * spec.major_radius;
      const auto n = static_cast<std::int64_t>(std::ceil(circumference / step));
      Polyline ring;
      for (std::int64_t k = 0; k <= n; ++k) {
        const double t = 2.0 * pi * static_cast<double>(k % n) / static_cast<double>(n);
        ring.push_back(as_point(c + Vec{spec.major_radius * std::cos(t), spec.major_radius * std::sin(t), 0.0}));
      }
      tubes.push_back({1, ring, spec.radius, false, false});
      break;
    }
    case PhantomKind::helix: {
      const double height = spec.pitch * spec.turns;
      const double arc = spec.turns * std::hypot(2.0 * pi * spec.major_radius, spec.pitch);
      const auto n = static_cast<std::int64_t>(std::ceil(arc / step));
      Polyline coil;
      for (std::int64_t k = 0; k <= n; ++k) {
        const double u = static_cast<double>(k) / static_cast<double>(n);
        const double t = 2.0 * pi * spec.turns * u;
        coil.push_back(as_point(
            c + Vec{spec.major_radius * std::cos(t), spec.major_radius * std::sin(t), height * (u - 0.5)}));
      }
      ph.terminals[1] = {coil.front(), coil.back()};
      tubes.push_back({1, coil, spec.radius, true, true});
      break;
    }
    case PhantomKind::y_branch: {
      const double half = 0.5 * spec.length;
      const double angle = spec.angle_deg * pi / 180.0;
      const Vec base{0, 0, 0}, fork{0, 0, half};
      const Vec left = fork + half * Vec{-std::sin(angle), 0, std::cos(angle)};
      const Vec right = fork + half * Vec{std::sin(angle), 0, std::cos(angle)};
      const double top = std::max(left.z, fork.z);
      const Vec shift = c - Vec{0, 0, 0.5 * top};
      const Point pb = as_point(base + shift), pf = as_point(fork + shift), pl = as_point(left + shift),
                  pr = as_point(right + shift);
      tubes.push_back({1, sampled_segment(pb, pf, step), spec.radius, true, false});
      tubes.push_back({1, sampled_segment(pf, pl, step), spec.radius, false, true});
      tubes.push_back({1, sampled_segment(pf, pr, step), spec.radius, false, true});
      ph.bifurcations[1] = {pf};
      ph.terminals[1] = {pl, pr};
      break;
    }
    case PhantomKind::multiclass_tree:
      tubes = build_tree(spec, step, ph);
      break;
  }

  check_radii(spec, tubes);
  if (spec.kind != PhantomKind::multiclass_tree && spec.kind != PhantomKind::ball) {
    for (const Tube& t : tubes) ph.centerlines[1].push_back(t.line);
  }
  if (spec.kind == PhantomKind::ball) ph.centerlines[1].push_back({as_point(c)});
  ph.volume = rasterize(spec, tubes);
  check_margin(ph.volume);
  trim_to_own_class(ph);
  return ph;
}

BinaryMask surface_voxels(const BinaryMask& mask) {
  const Dims& d = mask.dims();
  std::vector<std::uint8_t> out(static_cast<std::size_t>(d.size()), 0);
  const auto steps = face_steps(mask.spacing());
  for (std::int64_t z = 0; z < d.nz; ++z)
    for (std::int64_t y = 0; y < d.ny; ++y)
      for (std::int64_t x = 0; x < d.nx; ++x) {
        const bool self = mask.at(x, y, z) != 0;
        for (const NeighborStep& st : steps) {
          const std::int64_t nx = x + st.dx, ny = y + st.dy, nz = z + st.dz;
          if (!d.contains(nx, ny, nz)) continue;
          if ((mask.at(nx, ny, nz) != 0) != self) {
            out[d.index(x, y, z)] = 1;
            break;
          }
        }
      }
  return BinaryMask(d, mask.spacing(), std::move(out));
}

Phantom perturb(const Phantom& phantom, double probability, std::uint64_t rng_seed) {
  if (!(probability >= 0.0 && probability <= 0.3)) throw PreconditionError("perturb probability must be in [0, 0.3]");
  const LabelVolume& vol = phantom.volume;
  const Dims& d = vol.dims();
  const BinaryMask surface = surface_voxels(foreground(vol));
  std::vector<Label> out(vol.data().begin(), vol.data().end());
  std::mt19937_64 rng(rng_seed);
  const auto steps = face_steps(vol.spacing());
  for (std::int64_t i = 0; i < d.size(); ++i) {
    if (!surface[i]) continue;
    // Raw engine output keeps the draw identical on every platform.
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    if (u >= probability) continue;
    if (vol[i] != kBackground) {
      out[i] = kBackground;
      continue;
    }
    const Voxel v = d.voxel(i);
    Label pick = kBackground;
    for (const NeighborStep& st : steps) {
      const Voxel n{v.x + st.dx, v.y + st.dy, v.z + st.dz};
      if (!d.contains(n)) continue;
      const Label l = vol.at(n);
      if (l != kBackground && (pick == kBackground || l < pick)) pick = l;
    }
    out[i] = pick;
  }
  return {LabelVolume(d, vol.spacing(), std::move(out)), phantom.centerlines, phantom.bifurcations, phantom.terminals};
}

}  // namespace sas
