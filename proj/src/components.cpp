#include "sas/components.hpp"

namespace sas {

Components label_components(const BinaryMask& mask) {
  const Dims& d = mask.dims();
  const auto bits = mask.data();
  Components out;
  out.labels.assign(bits.size(), 0);
  std::vector<std::int64_t> stack;
  for (std::int64_t seed = 0; seed < d.size(); ++seed) {
    if (!bits[seed] || out.labels[seed] != 0) continue;
    const std::int32_t id = ++out.count;
    std::int64_t size = 0;
    out.labels[seed] = id;
    stack.push_back(seed);
    while (!stack.empty()) {
      const std::int64_t cur = stack.back();
      stack.pop_back();
      ++size;
      const Voxel v = d.voxel(cur);
      for (std::int64_t dz = -1; dz <= 1; ++dz)
        for (std::int64_t dy = -1; dy <= 1; ++dy)
          for (std::int64_t dx = -1; dx <= 1; ++dx) {
            const std::int64_t x = v.x + dx, y = v.y + dy, z = v.z + dz;
            if (!d.contains(x, y, z)) continue;
            const std::int64_t n = d.index(x, y, z);
            if (bits[n] && out.labels[n] == 0) {
              out.labels[n] = id;
              stack.push_back(n);
            }
          }
    }
    out.sizes.push_back(size);
  }
  return out;
}

}  // namespace sas
