// Python bindings. Arrays are indexed [x, y, z] and exchanged in Fortran
// order, which is the library's x-fastest memory layout.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sas/fractal.hpp"
#include "sas/io.hpp"
#include "sas/mpcskel.hpp"
#include "sas/patchplan.hpp"
#include "sas/phantoms.hpp"
#include "sas/pipeline.hpp"

namespace py = pybind11;
using namespace sas;

namespace {

using SpacingTuple = std::array<double, 3>;

Spacing to_spacing(const SpacingTuple& s) { return {s[0], s[1], s[2]}; }

template <class T>
using FArray = py::array_t<T, py::array::f_style | py::array::forcecast>;

LabelVolume labels_from(const py::array& in, const SpacingTuple& spacing) {
  if (in.ndim() != 3) {
    throw py::value_error("expected a 3-D array indexed [x, y, z], got " + std::to_string(in.ndim()) + " dimension(s)");
  }
  const char kind = in.dtype().kind();
  if (kind != 'i' && kind != 'u' && kind != 'b') {
    throw py::type_error("expected an integer or boolean label array, got dtype kind '" + std::string(1, kind) + "'");
  }
  if (in.size() == 0) throw py::value_error("empty array");
  const FArray<std::int64_t> a = FArray<std::int64_t>::ensure(in);
  const Dims dims{a.shape(0), a.shape(1), a.shape(2)};
  std::vector<Label> data(static_cast<std::size_t>(dims.size()));
  const std::int64_t* p = a.data();
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (p[i] < 0 || p[i] > std::numeric_limits<Label>::max()) throw py::value_error("labels must be non-negative");
    data[i] = static_cast<Label>(p[i]);
  }
  return LabelVolume(dims, to_spacing(spacing), std::move(data));
}

template <class T, class V>
py::array_t<T> to_array(const V& vol) {
  const Dims& d = vol.dims();
  py::array_t<T, py::array::f_style> out({d.nx, d.ny, d.nz});
  T* dst = out.mutable_data();
  const auto src = vol.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = static_cast<T>(src[i]);
  return out;
}

py::dict report_dict(const FractalReport& r) {
  py::dict out;
  py::list fd, r2, slope, low, scales, counts;
  for (const Axis a : kAxes) {
    fd.append(r[a].fd);
    r2.append(r[a].r_squared);
    slope.append(r[a].raw_slope);
    low.append(r[a].low_confidence);
    scales.append(r[a].scales);
    counts.append(r[a].counts);
  }
  out["fd"] = py::tuple(fd);
  out["r_squared"] = py::tuple(r2);
  out["raw_slope"] = py::tuple(slope);
  out["low_confidence"] = py::tuple(low);
  out["scales"] = py::tuple(scales);
  out["counts"] = py::tuple(counts);
  return out;
}

SkeletonParams skeleton_params(const Spacing& spacing, double alpha1, double gamma, double alpha2, double beta,
                               const std::string& radius_units) {
  PipelineConfig c;
  c.alpha1 = alpha1;
  c.gamma = gamma;
  c.alpha2 = alpha2;
  c.beta = beta;
  c.radius_units = radius_units_from_string(radius_units);
  return c.skeleton_params(spacing);
}

py::dict paths_dict(const MulticlassSkeleton& skel) {
  py::dict classes;
  for (const auto& [label, s] : skel.classes) {
    py::list paths;
    for (const SkeletonPath& p : s.paths) {
      py::list voxels;
      for (const Voxel& v : p.voxels) voxels.append(py::make_tuple(v.x, v.y, v.z));
      py::dict d;
      d["voxels"] = voxels;
      d["cost"] = p.cost;
      d["length"] = p.length;
      paths.append(d);
    }
    py::dict c;
    c["paths"] = paths;
    c["stubs"] = s.stubs.size();
    classes[py::int_(label)] = c;
  }
  py::dict out;
  out["classes"] = classes;
  out["warnings"] = skel.warnings;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Axis-specific fractal dimension, patch planning and minimum path-cost skeletons";

  // Translators are tried newest first, so the base class goes first.
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<EmptyShapeError>(m, "EmptyShapeError", PyExc_ValueError);
  py::register_exception<DimsMismatchError>(m, "DimsMismatchError", PyExc_ValueError);
  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
  py::register_exception<UnsupportedDatatypeError>(m, "UnsupportedDatatypeError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);
  py::register_exception<UnreachableTargetError>(m, "UnreachableTargetError", PyExc_RuntimeError);
  py::register_exception<DegenerateShapeError>(m, "DegenerateShapeError", PyExc_RuntimeError);

  m.def(
      "fractal_report",
      [](const py::array& labels, SpacingTuple spacing, const std::string& scales) {
        const LabelVolume vol = labels_from(labels, spacing);
        const ScaleSet set = scale_set_from_string(scales);
        FractalReport r;
        {
          py::gil_scoped_release release;
          r = fractal_report(foreground(vol), set);
        }
        return report_dict(r);
      },
      py::arg("labels"), py::arg("spacing") = SpacingTuple{1, 1, 1}, py::arg("scales") = "all",
      "Per-axis fractal dimension of the foreground (all labels > 0).");

  m.def(
      "rank_and_reassign",
      [](PatchSize initial, std::array<double, 3> fd, const std::string& tie_policy, std::int64_t divisor) {
        PatchPlan p = rank_and_reassign(initial, fd, tie_policy_from_string(tie_policy));
        if (divisor > 1) p = snap_to_divisor(p, divisor);
        py::dict out;
        out["initial_ps"] = py::tuple(py::cast(p.initial_ps));
        out["assigned_ps"] = py::tuple(py::cast(p.assigned_ps));
        out["fd"] = py::tuple(py::cast(p.fd));
        out["fd_rank"] = py::tuple(py::cast(p.fd_rank));
        out["tie_policy"] = to_string(p.tie_policy);
        out["notes"] = p.notes;
        return out;
      },
      py::arg("initial_ps"), py::arg("fd"), py::arg("tie_policy") = "stable", py::arg("divisor") = 1,
      "Give the most complex axis the smallest patch size.");

  m.def(
      "skeletonize_multiclass",
      [](const py::array& labels, SpacingTuple spacing, double alpha1, double gamma, double alpha2, double beta,
         const std::string& radius_units) {
        const LabelVolume vol = labels_from(labels, spacing);
        const SkeletonParams params = skeleton_params(vol.spacing(), alpha1, gamma, alpha2, beta, radius_units);
        std::optional<MulticlassSkeleton> skel;
        {
          py::gil_scoped_release release;
          skel = skeletonize_multiclass(vol, params);
        }
        if (skel->classes.empty()) throw EmptyShapeError();
        return py::make_tuple(to_array<std::uint32_t>(skeleton_labels(*skel, vol.dims(), vol.spacing())),
                              paths_dict(*skel));
      },
      py::arg("labels"), py::arg("spacing") = SpacingTuple{1, 1, 1}, py::arg("alpha1") = 1e5, py::arg("gamma") = 4.0,
      py::arg("alpha2") = 1.8, py::arg("beta") = 4.0, py::arg("radius_units") = "spacing-max",
      "Per-class skeleton label array and path listing.");

  m.def(
      "weight_map",
      [](const py::array& labels, SpacingTuple spacing, const std::string& mode, double tau, double alpha1,
         double gamma, double alpha2, double beta, const std::string& radius_units) {
        const LabelVolume vol = labels_from(labels, spacing);
        const SkeletonParams params = skeleton_params(vol.spacing(), alpha1, gamma, alpha2, beta, radius_units);
        const WeightMode wm = weight_mode_from_string(mode);
        std::optional<ScalarVolume> w;
        {
          py::gil_scoped_release release;
          w = multiclass_weight_map(skeletonize_multiclass(vol, params), vol, wm, tau);
        }
        return to_array<double>(*w);
      },
      py::arg("labels"), py::arg("spacing") = SpacingTuple{1, 1, 1}, py::arg("mode") = "binary", py::arg("tau") = 2.0,
      py::arg("alpha1") = 1e5, py::arg("gamma") = 4.0, py::arg("alpha2") = 1.8, py::arg("beta") = 4.0,
      py::arg("radius_units") = "spacing-max", "Skeleton weight map over all classes.");

  m.def(
      "phantom",
      [](const std::string& kind, std::array<std::int64_t, 3> dims, SpacingTuple spacing, double radius,
         double length, const std::string& axis, double angle, double major_radius, double pitch, double turns,
         int classes, double noise, std::uint64_t seed) {
        PhantomSpec s;
        s.kind = phantom_kind_from_string(kind);
        s.dims = {dims[0], dims[1], dims[2]};
        s.spacing = to_spacing(spacing);
        s.radius = radius;
        s.length = length;
        s.axis = axis_from_string(axis);
        s.angle_deg = angle;
        s.major_radius = major_radius;
        s.pitch = pitch;
        s.turns = turns;
        s.class_count = classes;
        s.rng_seed = seed;
        Phantom ph = generate(s);
        if (noise > 0.0) ph = perturb(ph, noise, seed);
        return to_array<std::uint32_t>(ph.volume);
      },
      py::arg("kind") = "cylinder", py::arg("dims") = std::array<std::int64_t, 3>{64, 64, 64},
      py::arg("spacing") = SpacingTuple{1, 1, 1}, py::arg("radius") = 4.0, py::arg("length") = 40.0,
      py::arg("axis") = "z", py::arg("angle") = 30.0, py::arg("major_radius") = 20.0, py::arg("pitch") = 40.0,
      py::arg("turns") = 2.0, py::arg("classes") = 19, py::arg("noise") = 0.0, py::arg("seed") = 0,
      "Synthetic label array.");

  m.def(
      "read_volume",
      [](const std::string& path) {
        const LoadedVolume v = read_volume(path);
        return std::visit(
            [](const auto& vol) {
              const Spacing& s = vol.spacing();
              py::object arr;
              if constexpr (std::is_same_v<std::decay_t<decltype(vol)>, ScalarVolume>) arr = to_array<double>(vol);
              else arr = to_array<std::uint32_t>(vol);
              return py::make_tuple(arr, py::make_tuple(s.x, s.y, s.z));
            },
            v.volume);
      },
      py::arg("path"), "Read a NIfTI or raw volume as (array, spacing).");
}
