#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "sas/io.hpp"
#include "sas/phantoms.hpp"
#include "sas/pipeline.hpp"

using namespace sas;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("sas_pipe_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

void write_corpus(const fs::path& dir) {
  PhantomSpec cyl;
  cyl.radius = 3.0;
  cyl.length = 30.0;
  cyl.dims = {32, 32, 40};
  write_volume(generate(cyl).volume, dir / "a_cylinder.nii.gz");

  PhantomSpec y;
  y.kind = PhantomKind::y_branch;
  y.radius = 3.0;
  y.length = 40.0;
  y.dims = {48, 48, 48};
  write_volume(generate(y).volume, dir / "b_ybranch.nii");

  PhantomSpec tree;
  tree.kind = PhantomKind::multiclass_tree;
  tree.class_count = 3;
  tree.radius = 3.0;
  tree.length = 20.0;
  tree.spacing = {0.78, 0.78, 0.67};
  write_volume(generate(tree).volume, dir / "c_tree.json");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

PipelineConfig config(const fs::path& data, const fs::path& out) {
  PipelineConfig c;
  c.dataset_dir = data;
  c.output_dir = out;
  c.initial_ps = {128, 96, 192};
  c.divisor = 16;
  return c;
}

}  // namespace

TEST_CASE("three phantoms give three cases and one plan") {
  TempDir tmp;
  fs::create_directories(tmp.path / "data");
  write_corpus(tmp.path / "data");
  const PipelineSummary s = run_pipeline(config(tmp.path / "data", tmp.path / "out"));
  CHECK(s.exit_code() == 0);
  CHECK(s.succeeded == 3);
  const auto& m = s.manifest;
  CHECK(m["cases"].size() == 3);
  CHECK(m["plan"]["file"] == "plan.json");
  CHECK(fs::exists(tmp.path / "out" / "plan.json"));
  CHECK(fs::exists(tmp.path / "out" / "manifest.json"));
  int skeletons = 0;
  for (const auto& c : m["cases"]) {
    CHECK(c["status"] == "ok");
    const fs::path skel = tmp.path / "out" / c["outputs"]["skeleton"].get<std::string>();
    skeletons += fs::exists(skel) ? 1 : 0;
    CHECK(fs::exists(tmp.path / "out" / c["outputs"]["weights"].get<std::string>()));
  }
  CHECK(skeletons == 3);
  const LabelVolume tree_skel = read_label_volume(tmp.path / "out" / "c_tree_skeleton.nii.gz");
  CHECK(tree_skel.spacing().z == doctest::Approx(0.67).epsilon(1e-6));
}

TEST_CASE("a corrupt file fails its case only") {
  TempDir tmp;
  fs::create_directories(tmp.path / "data");
  write_corpus(tmp.path / "data");
  fs::remove(tmp.path / "data" / "c_tree.json");
  fs::remove(tmp.path / "data" / "c_tree.bin");
  std::ofstream(tmp.path / "data" / "z_broken.nii") << "not a nifti file";
  const PipelineSummary s = run_pipeline(config(tmp.path / "data", tmp.path / "out"));
  CHECK(s.exit_code() != 0);
  CHECK(s.succeeded == 2);
  CHECK(s.failed == 1);
  const auto& cases = s.manifest["cases"];
  CHECK(cases[2]["status"] == "failed");
  CHECK_FALSE(cases[2]["error"].get<std::string>().empty());
}

TEST_CASE("reruns produce the same manifest and outputs") {
  TempDir tmp;
  fs::create_directories(tmp.path / "data");
  write_corpus(tmp.path / "data");
  PipelineConfig a = config(tmp.path / "data", tmp.path / "a");
  PipelineConfig b = config(tmp.path / "data", tmp.path / "b");
  b.threads = 3;
  auto ma = run_pipeline(a).manifest, mb = run_pipeline(b).manifest;
  ma.erase("generated_at");
  mb.erase("generated_at");
  CHECK(ma.dump() == mb.dump());
  for (const auto& entry : fs::directory_iterator(tmp.path / "a")) {
    const std::string name = entry.path().filename().string();
    if (name == "manifest.json") continue;
    CHECK_MESSAGE(slurp(entry.path()) == slurp(tmp.path / "b" / name), name);
  }
}

TEST_CASE("configuration errors") {
  TempDir tmp;
  PipelineConfig c = config(tmp.path / "missing", tmp.path / "out");
  CHECK_THROWS_AS(run_pipeline(c), PreconditionError);
  fs::create_directories(tmp.path / "empty");
  c.dataset_dir = tmp.path / "empty";
  CHECK_THROWS_AS(run_pipeline(c), PreconditionError);
  CHECK_THROWS_AS(pipeline_config_from_json({{"bogus", 1}}), PreconditionError);
  CHECK_THROWS_AS(pipeline_config_from_json({{"scales", "log"}}), PreconditionError);
  const PipelineConfig j = pipeline_config_from_json(
      {{"initial_ps", {112, 112, 176}}, {"tie_policy", "promote"}, {"radius_units", "mm"}, {"threads", 2}});
  CHECK(j.initial_ps == PatchSize{112, 112, 176});
  CHECK(j.tie_policy == TiePolicy::promote);
  CHECK(j.radius_units == RadiusUnits::mm);
  CHECK(j.threads == 2);
}

TEST_CASE("radius units resolve against the case spacing") {
  PipelineConfig c;
  const Spacing s{0.78, 0.78, 0.67};
  CHECK(c.skeleton_params(s).radius.beta == doctest::Approx(4.0 * 0.78));
  c.radius_units = RadiusUnits::mm;
  CHECK(c.skeleton_params(s).radius.beta == 4.0);
}
