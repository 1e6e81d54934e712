#pragma once

// Dense 3D volumes. Memory layout is x fastest-varying, then y, then z
// (NIfTI order); every module indexes through Dims so the convention lives
// in one place.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "sas/error.hpp"

namespace sas {

using Label = std::uint32_t;
inline constexpr Label kBackground = 0;

enum class Axis : int { x = 0, y = 1, z = 2 };

inline constexpr std::array<Axis, 3> kAxes{Axis::x, Axis::y, Axis::z};

std::string to_string(Axis axis);
Axis axis_from_string(const std::string& name);

struct Voxel {
  std::int64_t x = 0;
  std::int64_t y = 0;
  std::int64_t z = 0;

  std::int64_t operator[](Axis a) const {
    return a == Axis::x ? x : (a == Axis::y ? y : z);
  }
  friend bool operator==(const Voxel&, const Voxel&) = default;
  friend auto operator<=>(const Voxel&, const Voxel&) = default;
};

struct Dims {
  std::int64_t nx = 0;
  std::int64_t ny = 0;
  std::int64_t nz = 0;

  std::int64_t size() const { return nx * ny * nz; }
  std::int64_t extent(Axis a) const {
    return a == Axis::x ? nx : (a == Axis::y ? ny : nz);
  }
  bool contains(std::int64_t x, std::int64_t y, std::int64_t z) const {
    return x >= 0 && y >= 0 && z >= 0 && x < nx && y < ny && z < nz;
  }
  bool contains(const Voxel& v) const { return contains(v.x, v.y, v.z); }
  std::int64_t index(std::int64_t x, std::int64_t y, std::int64_t z) const {
    return x + nx * (y + ny * z);
  }
  std::int64_t index(const Voxel& v) const { return index(v.x, v.y, v.z); }
  Voxel voxel(std::int64_t index) const {
    const std::int64_t x = index % nx;
    const std::int64_t rest = index / nx;
    return {x, rest % ny, rest / ny};
  }
  friend bool operator==(const Dims&, const Dims&) = default;
};

/// Physical voxel size in mm.
struct Spacing {
  double x = 1.0;
  double y = 1.0;
  double z = 1.0;

  double operator[](Axis a) const {
    return a == Axis::x ? x : (a == Axis::y ? y : z);
  }
  double max() const { return std::max({x, y, z}); }
  double min() const { return std::min({x, y, z}); }
  /// Length of the voxel's space diagonal.
  double diagonal() const { return std::sqrt(x * x + y * y + z * z); }
  friend bool operator==(const Spacing&, const Spacing&) = default;
};

/// Physical point in mm; voxel (i,j,k) has its center at (i*sx, j*sy, k*sz).
struct Point {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

inline Point center_of(const Voxel& v, const Spacing& s) {
  return {static_cast<double>(v.x) * s.x, static_cast<double>(v.y) * s.y,
          static_cast<double>(v.z) * s.z};
}

inline double distance(const Point& a, const Point& b) {
  const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

void validate_geometry(const Dims& dims, const Spacing& spacing);

/// Immutable dense volume. Derived volumes are always new allocations.
template <class T>
class Volume {
 public:
  using value_type = T;

  Volume(Dims dims, Spacing spacing, std::vector<T> data)
      : dims_(dims), spacing_(spacing), data_(std::move(data)) {
    validate_geometry(dims_, spacing_);
    if (static_cast<std::int64_t>(data_.size()) != dims_.size()) {
      throw PreconditionError("volume data length " + std::to_string(data_.size()) +
                              " does not match dims product " + std::to_string(dims_.size()));
    }
    if constexpr (std::is_floating_point_v<T>) {
      for (const T v : data_) {
        if (!std::isfinite(v)) throw PreconditionError("scalar volume contains a non-finite value");
      }
    }
  }

  /// Volume filled with a constant.
  static Volume filled(Dims dims, Spacing spacing, T value = T{}) {
    validate_geometry(dims, spacing);
    return Volume(dims, spacing, std::vector<T>(static_cast<std::size_t>(dims.size()), value));
  }

  const Dims& dims() const { return dims_; }
  const Spacing& spacing() const { return spacing_; }
  std::span<const T> data() const { return data_; }
  std::int64_t size() const { return dims_.size(); }

  const T& operator[](std::int64_t index) const { return data_[static_cast<std::size_t>(index)]; }
  const T& at(const Voxel& v) const { return data_[static_cast<std::size_t>(dims_.index(v))]; }
  const T& at(std::int64_t x, std::int64_t y, std::int64_t z) const {
    return data_[static_cast<std::size_t>(dims_.index(x, y, z))];
  }

  bool same_grid(const Dims& d, const Spacing& s) const { return dims_ == d && spacing_ == s; }
  template <class U>
  bool same_grid(const Volume<U>& other) const {
    return same_grid(other.dims(), other.spacing());
  }

  friend bool operator==(const Volume&, const Volume&) = default;

 private:
  Dims dims_;
  Spacing spacing_;
  std::vector<T> data_;
};

using LabelVolume = Volume<Label>;
using ScalarVolume = Volume<double>;
using BinaryMask = Volume<std::uint8_t>;

template <class A, class B>
void require_same_grid(const Volume<A>& a, const Volume<B>& b, const char* what) {
  if (!a.same_grid(b)) throw DimsMismatchError(std::string(what) + ": volumes do not share dims/spacing");
}

std::int64_t count_foreground(const BinaryMask& mask);

struct ClassMask {
  BinaryMask mask;
  bool absent = false;  ///< class_id did not occur in the volume
};

/// Mask of voxels equal to class_id. An absent class yields an all-false
/// mask with the absent flag set.
ClassMask extract_class(const LabelVolume& vol, Label class_id);

/// Mask of every non-background voxel.
BinaryMask foreground(const LabelVolume& vol);

/// Sorted list of non-background labels present in the volume.
std::vector<Label> present_classes(const LabelVolume& vol);

/// Inverse of extract_class over several classes; later entries do not
/// overwrite earlier ones.
LabelVolume embed_classes(const Dims& dims, const Spacing& spacing,
                          std::span<const std::pair<Label, BinaryMask>> classes);

/// Face/edge/corner neighbor offsets of a voxel with their physical length.
struct NeighborStep {
  int dx, dy, dz;
  double length;
};
std::array<NeighborStep, 26> neighbor_steps(const Spacing& spacing);
std::array<NeighborStep, 6> face_steps(const Spacing& spacing);

}  // namespace sas
