#include "sas/volume.hpp"

#include <algorithm>
#include <set>

namespace sas {

std::string to_string(Axis axis) {
  switch (axis) {
    case Axis::x: return "x";
    case Axis::y: return "y";
    case Axis::z: return "z";
  }
  return "?";
}

Axis axis_from_string(const std::string& name) {
  if (name == "x") return Axis::x;
  if (name == "y") return Axis::y;
  if (name == "z") return Axis::z;
  throw PreconditionError("unknown axis '" + name + "'");
}

void validate_geometry(const Dims& dims, const Spacing& spacing) {
  if (dims.nx <= 0 || dims.ny <= 0 || dims.nz <= 0) {
    throw PreconditionError("volume dims must be positive");
  }
  for (const Axis a : kAxes) {
    const double s = spacing[a];
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw PreconditionError("spacing along " + to_string(a) + " must be strictly positive");
    }
  }
}

std::int64_t count_foreground(const BinaryMask& mask) {
  return std::count_if(mask.data().begin(), mask.data().end(), [](std::uint8_t v) { return v != 0; });
}

ClassMask extract_class(const LabelVolume& vol, Label class_id) {
  if (class_id == kBackground) throw PreconditionError("extract_class: class_id must be > 0");
  std::vector<std::uint8_t> out(vol.data().size());
  bool any = false;
  std::transform(vol.data().begin(), vol.data().end(), out.begin(), [&](Label v) {
    const bool hit = v == class_id;
    any = any || hit;
    return static_cast<std::uint8_t>(hit);
  });
  return {BinaryMask(vol.dims(), vol.spacing(), std::move(out)), !any};
}

BinaryMask foreground(const LabelVolume& vol) {
  std::vector<std::uint8_t> out(vol.data().size());
  std::transform(vol.data().begin(), vol.data().end(), out.begin(),
                 [](Label v) { return static_cast<std::uint8_t>(v != kBackground); });
  return BinaryMask(vol.dims(), vol.spacing(), std::move(out));
}

std::vector<Label> present_classes(const LabelVolume& vol) {
  std::set<Label> seen;
  for (const Label v : vol.data()) {
    if (v != kBackground) seen.insert(v);
  }
  return {seen.begin(), seen.end()};
}

LabelVolume embed_classes(const Dims& dims, const Spacing& spacing,
                          std::span<const std::pair<Label, BinaryMask>> classes) {
  std::vector<Label> out(static_cast<std::size_t>(dims.size()), kBackground);
  for (const auto& [label, mask] : classes) {
    if (!mask.same_grid(dims, spacing)) throw DimsMismatchError("embed_classes: mask grid mismatch");
    const auto bits = mask.data();
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (bits[i] && out[i] == kBackground) out[i] = label;
    }
  }
  return LabelVolume(dims, spacing, std::move(out));
}

std::array<NeighborStep, 26> neighbor_steps(const Spacing& s) {
  std::array<NeighborStep, 26> steps{};
  std::size_t n = 0;
  for (int dz = -1; dz <= 1; ++dz) {
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0 && dz == 0) continue;
        const double len = std::sqrt(dx * dx * s.x * s.x + dy * dy * s.y * s.y + dz * dz * s.z * s.z);
        steps[n++] = {dx, dy, dz, len};
      }
    }
  }
  return steps;
}

std::array<NeighborStep, 6> face_steps(const Spacing& s) {
  return {{{-1, 0, 0, s.x}, {1, 0, 0, s.x}, {0, -1, 0, s.y},
           {0, 1, 0, s.y}, {0, 0, -1, s.z}, {0, 0, 1, s.z}}};
}

}  // namespace sas
