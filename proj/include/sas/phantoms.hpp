#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sas/volume.hpp"

namespace sas {

enum class PhantomKind { cylinder, torus, y_branch, ball, helix, multiclass_tree };

std::string to_string(PhantomKind kind);
PhantomKind phantom_kind_from_string(const std::string& name);

/// Geometry of a synthetic tubular phantom. All lengths in mm; the shape is
/// centered on the grid's central voxel.
struct PhantomSpec {
  PhantomKind kind = PhantomKind::cylinder;
  Dims dims{64, 64, 64};
  Spacing spacing{};

  double radius = 4.0;  ///< tube radius (ball radius for `ball`, trunk radius for trees)
  double length = 40.0;  ///< cylinder length; trunk plus one branch for y_branch; trunk for trees
  Axis axis = Axis::z;   ///< cylinder axis
  double angle_deg = 30.0;     ///< angle between each daughter branch and its parent's axis
  double major_radius = 20.0;  ///< torus ring radius or helix coil radius
  double pitch = 40.0;         ///< helix rise per turn
  double turns = 2.0;          ///< helix turns
  int class_count = 19;        ///< multiclass_tree segments (odd: 1 trunk + pairs of daughters)
  double radius_decay = 0.8;   ///< multiclass_tree daughter/parent radius ratio
  double length_decay = 0.8;   ///< multiclass_tree daughter/parent length ratio
  std::uint64_t rng_seed = 0;  ///< multiclass_tree branching-plane jitter
  double jitter_deg = 0.0;
};

using Polyline = std::vector<Point>;

struct Phantom {
  LabelVolume volume;
  /// Densely sampled centerline pieces per class (mm). A closed curve
  /// repeats its first point at the end.
  std::map<Label, std::vector<Polyline>> centerlines;
  std::map<Label, std::vector<Point>> bifurcations;
  /// Free branch ends (excluding a tree's root).
  std::map<Label, std::vector<Point>> terminals;
};

/// Rasterizes the spec: a voxel belongs to class c when its center lies
/// within c's tube radius of c's centerline (point-to-segment distance, flat
/// caps at free ends). Overlaps go to the lower class id.
Phantom generate(const PhantomSpec& spec);

/// Voxels with a face neighbor of the opposite value.
BinaryMask surface_voxels(const BinaryMask& mask);

/// Toggles every surface voxel (foreground or background with a face
/// neighbor of the opposite value) independently with probability p.
/// Toggled-on voxels take the label of their lowest-labeled face neighbor.
/// Centerlines are carried over unchanged.
Phantom perturb(const Phantom& phantom, double probability, std::uint64_t rng_seed);

/// Distance from a point to a polyline, mm.
double distance_to_polyline(const Point& p, const Polyline& line);

}  // namespace sas
