// Acceptance suite: one PASS/FAIL line per criterion. Tolerances and
// runtime limits are fixed here; the exit status is the number of failures.

#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include <spdlog/spdlog.h>

#include "oracles.hpp"
#include "sas/components.hpp"
#include "sas/edt.hpp"
#include "sas/fractal.hpp"
#include "sas/io.hpp"
#include "sas/metrics.hpp"
#include "sas/mpcskel.hpp"
#include "sas/patchplan.hpp"
#include "sas/phantoms.hpp"
#include "sas/pipeline.hpp"

using namespace sas;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (ok) return;
    if (pass) detail << "failed: ";
    else detail << "; ";
    detail << what;
    pass = false;
  }
};

int failures = 0;

void criterion(const char* name, double limit_s, const std::function<void(Outcome&)>& body) {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.require(false, std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.require(secs < limit_s, "runtime " + std::to_string(secs) + " s over " + std::to_string(limit_s) + " s");
  std::printf("%s %-26s %7.2fs  %s\n", out.pass ? "PASS" : "FAIL", name, secs, out.detail.str().c_str());
  std::fflush(stdout);
  failures += out.pass ? 0 : 1;
}

struct TubeCase {
  const char* name;
  PhantomSpec spec;
};

std::vector<TubeCase> tube_phantoms() {
  const auto cyl = [](double r, double len, Axis a, Dims d = {64, 64, 64}, Spacing s = {}) {
    PhantomSpec p;
    p.radius = r;
    p.length = len;
    p.axis = a;
    p.dims = d;
    p.spacing = s;
    return p;
  };
  const auto torus = [](double r, double major, Dims d) {
    PhantomSpec p;
    p.kind = PhantomKind::torus;
    p.radius = r;
    p.major_radius = major;
    p.dims = d;
    return p;
  };
  const auto helix = [](double r, double major, double pitch, double turns, Dims d) {
    PhantomSpec p;
    p.kind = PhantomKind::helix;
    p.radius = r;
    p.major_radius = major;
    p.pitch = pitch;
    p.turns = turns;
    p.dims = d;
    return p;
  };
  return {
      {"cylinder r2 z", cyl(2, 44, Axis::z)},
      {"cylinder r4 x", cyl(4, 44, Axis::x)},
      {"cylinder r6 y", cyl(6, 40, Axis::y)},
      {"cylinder r3 anisotropic", cyl(3, 28, Axis::z, {48, 48, 64}, {0.78, 0.78, 0.67})},
      {"torus r2", torus(2, 20, {64, 64, 24})},
      {"torus r3", torus(3, 26, {64, 64, 24})},
      {"torus r4", torus(4, 34, {84, 84, 24})},
      {"helix r2", helix(2, 12, 20, 2, {48, 48, 64})},
      {"helix r4", helix(4, 14, 28, 1.5, {48, 48, 64})},
      {"helix r6", helix(6, 18, 36, 1.25, {64, 64, 72})},
  };
}

SkeletonParams tube_params(const Spacing& s) {
  SkeletonParams p;
  p.radius = RadiusParams::aorta(s);
  return p;
}

std::vector<Polyline> all_centerlines(const Phantom& ph) {
  std::vector<Polyline> out;
  for (const auto& [c, lines] : ph.centerlines) out.insert(out.end(), lines.begin(), lines.end());
  return out;
}

std::int64_t crowded_voxels(const BinaryMask& skel) {
  const Dims& d = skel.dims();
  std::int64_t n = 0;
  for (std::int64_t i = 0; i < d.size(); ++i) {
    if (!skel[i]) continue;
    const Voxel v = d.voxel(i);
    int nb = 0;
    for (int dz = -1; dz <= 1; ++dz)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0 && dz == 0) continue;
          if (d.contains(v.x + dx, v.y + dy, v.z + dz) && skel.at(v.x + dx, v.y + dy, v.z + dz)) ++nb;
        }
    n += nb > 3 ? 1 : 0;
  }
  return n;
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::warn);
  criterion("fdps golden cases", 1.0, [](Outcome& o) {
    const PatchPlan airway = rank_and_reassign({128, 96, 192}, {0.44, 0.40, 0.53}, TiePolicy::stable);
    const PatchPlan aorta = rank_and_reassign({112, 112, 176}, {0.58, 0.58, 0.71}, TiePolicy::promote);
    o.require(airway.assigned_ps == PatchSize{128, 192, 96}, "airway mapping");
    o.require(aorta.assigned_ps == PatchSize{176, 176, 112}, "aorta mapping");
    o.detail << "airway {128,192,96}, aorta {176,176,112}";
  });

  criterion("fractal dimension sanity", 30.0, [](Outcome& o) {
    const FractalReport cube = fractal_report(BinaryMask::filled({64, 64, 64}, {}, 1));
    for (const Axis a : kAxes) {
      o.require(std::abs(cube[a].fd - 1.0) <= 0.05, "cube fd_" + to_string(a) + " = " + std::to_string(cube[a].fd));
    }
    // Reported alongside: the same cube with power-of-two box sizes, where
    // every slab is full and N(r) = n/r exactly.
    const double pow2 = fractal_report(BinaryMask::filled({64, 64, 64}, {}, 1), ScaleSet::pow2)[Axis::x].fd;
    std::vector<std::uint8_t> plane(32 * 32 * 32, 0);
    const Dims pd{32, 32, 32};
    for (int y = 0; y < 32; ++y)
      for (int x = 0; x < 32; ++x) plane[pd.index(x, y, 11)] = 1;
    o.require(fractal_report(BinaryMask(pd, {}, plane))[Axis::z].fd == 0.0, "plane fd_z");
    std::mt19937_64 rng(101);
    std::int64_t comparisons = 0, mismatches = 0;
    for (int trial = 0; trial < 100; ++trial) {
      const Dims d = oracle::random_dims(rng, 4, 32);
      const double density = std::uniform_real_distribution<double>(0.0002, 0.02)(rng);
      const BinaryMask m = oracle::random_mask(rng, d, {}, density);
      for (const Axis a : kAxes)
        for (std::int64_t r = 2; r <= d.extent(a) / 2; ++r, ++comparisons)
          mismatches += count_slabs(m, a, r) != oracle::count_slabs(m, static_cast<int>(a), r) ? 1 : 0;
    }
    o.require(mismatches == 0, std::to_string(mismatches) + " slab count mismatches");
    if (!o.pass) o.detail << " | ";
    o.detail << "cube fd " << cube[Axis::x].fd << "/" << cube[Axis::y].fd << "/" << cube[Axis::z].fd
             << " (pow2 scales " << pow2 << "), plane fd_z 0, " << comparisons << " slab counts exact";
  });

  criterion("edt exactness", 60.0, [](Outcome& o) {
    std::mt19937_64 rng(202);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      const Dims d = oracle::random_dims(rng, 1, 24);
      const Spacing s = oracle::random_spacing(rng);
      const double density = std::uniform_real_distribution<double>(0.3, 0.99)(rng);
      BinaryMask m = oracle::random_mask(rng, d, s, density);
      if (count_foreground(m) == 0) m = BinaryMask::filled(d, s, 1);
      const DistanceField f = distance_transform(m);
      const std::vector<double> ref = oracle::edt(m);
      for (std::int64_t i = 0; i < d.size(); ++i) {
        const double r = ref[static_cast<std::size_t>(i)];
        const double err = std::abs(f.field[i] - r);
        worst = std::max(worst, r > 0.0 ? err / r : err);
      }
    }
    o.require(worst <= 1e-9, "relative error " + std::to_string(worst));
    o.detail << "50 masks, worst relative error " << worst;
  });

  std::map<std::string, std::int64_t> clean_counts;
  criterion("skeleton fidelity", 300.0, [&](Outcome& o) {
    for (const TubeCase& tc : tube_phantoms()) {
      const Phantom ph = generate(tc.spec);
      const BinaryMask fg = foreground(ph.volume);
      const Skeleton sk = skeletonize(fg, tube_params(fg.spacing()));
      clean_counts[tc.name] = sk.voxel_count();
      const CenterlineFidelity f = centerline_fidelity(sk.mask, all_centerlines(ph));
      const std::string tag = tc.name;
      o.require(f.mean_dist <= fg.spacing().diagonal(), tag + " mean " + std::to_string(f.mean_dist));
      o.require(f.coverage >= 0.95, tag + " coverage " + std::to_string(f.coverage));
      o.require(count_components(sk.mask) == count_components(fg), tag + " components");
      o.detail << tag << " " << f.mean_dist << "/" << f.coverage << "; ";
    }
  });

  criterion("no clumps under noise", 300.0, [&](Outcome& o) {
    double worst_fraction = 0.0, worst_ratio = 0.0;
    int runs = 0;
    for (const TubeCase& tc : tube_phantoms()) {
      const Phantom clean = generate(tc.spec);
      const std::int64_t base = clean_counts.count(tc.name) ? clean_counts.at(tc.name)
                                                             : skeletonize(foreground(clean.volume),
                                                                           tube_params(tc.spec.spacing)).voxel_count();
      for (std::uint64_t seed = 1; seed <= 3; ++seed, ++runs) {
        const BinaryMask fg = foreground(perturb(clean, 0.1, seed).volume);
        const Skeleton sk = skeletonize(fg, tube_params(fg.spacing()));
        const double fraction = static_cast<double>(crowded_voxels(sk.mask)) / static_cast<double>(sk.voxel_count());
        const double ratio = static_cast<double>(sk.voxel_count()) / static_cast<double>(base);
        worst_fraction = std::max(worst_fraction, fraction);
        worst_ratio = std::max(worst_ratio, ratio);
        const std::string tag = std::string(tc.name) + " seed " + std::to_string(seed);
        o.require(fraction <= 0.02, tag + " crowded fraction " + std::to_string(fraction));
        o.require(ratio <= 1.5, tag + " size ratio " + std::to_string(ratio));
      }
    }
    o.detail << runs << " runs, worst crowded fraction " << worst_fraction << ", worst size ratio " << worst_ratio;
  });

  criterion("cost and radius formulas", 10.0, [](Outcome& o) {
    std::mt19937_64 rng(303);
    double worst_c = 0.0, worst_r = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const Dims d = oracle::random_dims(rng, 4, 20);
      const Spacing s = oracle::random_spacing(rng);
      const BinaryMask m = oracle::random_mask(rng, d, s, 0.9);
      if (count_foreground(m) == 0) continue;
      const DistanceField df = distance_transform(m);
      const CostField cf = cost_field(df, {1e5, 4.0});
      const double smax = std::max({s.x, s.y, s.z});
      const RadiusParams aorta = RadiusParams::aorta(s), airway = RadiusParams::airway(s);
      for (std::int64_t i = 0; i < d.size(); ++i) {
        if (!m[i]) continue;
        const double dist = df.field[i];
        const double ratio = 1.0 - dist / df.max_dist;
        const double direct = 1e5 * ratio * ratio * ratio * ratio;
        worst_c = std::max(worst_c, std::abs(cf.values[i] - direct) / 1e5);
        const double ra = 1.8 * smax * dist + 4.0 * smax, rb = 2.4 * smax * dist + 2.0 * smax;
        worst_r = std::max({worst_r, std::abs(aorta.radius(dist) - ra) / ra, std::abs(airway.radius(dist) - rb) / rb});
      }
    }
    o.require(worst_c <= 1e-12, "cost error " + std::to_string(worst_c));
    o.require(worst_r <= 1e-12, "radius error " + std::to_string(worst_r));
    o.detail << "worst relative error cost " << worst_c << ", radius " << worst_r;
  });

  criterion("metrics oracles", 60.0, [](Outcome& o) {
    std::mt19937_64 rng(404);
    double worst_hd = 0.0;
    int bad = 0;
    for (int trial = 0; trial < 20; ++trial) {
      const Dims d = oracle::random_dims(rng, 2, 24);
      const Spacing s = oracle::random_spacing(rng);
      const BinaryMask a = oracle::random_mask(rng, d, s, 0.15), b = oracle::random_mask(rng, d, s, 0.15);
      bad += dice(a, b) != oracle::dice(a, b) ? 1 : 0;
      bad += betti0_error(a, b) != std::abs(oracle::components(a) - oracle::components(b)) ? 1 : 0;
      if (count_foreground(a) > 0 && count_foreground(b) > 0) {
        worst_hd = std::max(worst_hd, std::abs(*hd95(a, b) - oracle::hd95(a, b)));
      }
    }
    o.require(bad == 0, std::to_string(bad) + " dice/betti0 mismatches");
    o.require(worst_hd <= 1e-9, "hd95 error " + std::to_string(worst_hd));

    PhantomSpec spec;
    spec.kind = PhantomKind::multiclass_tree;
    spec.class_count = 5;
    spec.radius = 4.0;
    spec.length = 24.0;
    spec.dims = {72, 72, 72};
    const LabelVolume vol = generate(spec).volume;
    SkeletonParams params;
    params.radius = RadiusParams::airway(vol.spacing());
    const MetricsReport rep = evaluate(vol, vol, params);
    o.require(rep.per_class.size() == 5, "class count");
    for (const auto& [c, m] : rep.per_class) {
      o.require(m.dice == 1.0 && m.cldice == 1.0 && m.hd95 == 0.0 && m.betti0_error == 0,
                "class " + std::to_string(c) + " not perfect");
    }
    o.detail << "hd95 worst error " << worst_hd << ", " << rep.per_class.size() << " classes perfect";
  });

  criterion("pipeline determinism", 300.0, [](Outcome& o) {
    const fs::path root = fs::temp_directory_path() / ("sas_accept_" + std::to_string(::getpid()));
    fs::remove_all(root);
    fs::create_directories(root / "data");
    PhantomSpec tree;
    tree.kind = PhantomKind::multiclass_tree;
    tree.class_count = 7;
    tree.radius = 3.0;
    tree.length = 22.0;
    tree.dims = {80, 80, 96};
    tree.spacing = {0.78, 0.78, 0.67};
    write_volume(generate(tree).volume, root / "data" / "tree.nii.gz");
    for (const TubeCase& tc : tube_phantoms()) {
      if (tc.spec.kind == PhantomKind::cylinder && tc.spec.radius > 3.0) continue;
      std::string file = tc.name;
      for (char& ch : file) ch = ch == ' ' ? '_' : ch;
      write_volume(perturb(generate(tc.spec), 0.1, 9).volume, root / "data" / (file + ".nii.gz"));
    }
    PipelineConfig cfg;
    cfg.dataset_dir = root / "data";
    cfg.initial_ps = {128, 96, 192};
    cfg.divisor = 16;
    cfg.output_dir = root / "run1";
    nlohmann::json first = run_pipeline(cfg).manifest;
    cfg.output_dir = root / "run2";
    cfg.threads = 2;
    const PipelineSummary second_run = run_pipeline(cfg);
    nlohmann::json second = second_run.manifest;
    first.erase("generated_at");
    second.erase("generated_at");
    o.require(first == second, "manifests differ");
    o.require(second_run.exit_code() == 0, "case failures");
    o.detail << second_run.cases << " cases, manifests identical";
    fs::remove_all(root);
  });

  std::printf("%d criteria failed\n", failures);
  return failures;
}
