#include <doctest.h>

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "isodeform/scene.hpp"
#include "isodeform/suites.hpp"

using namespace isodeform;

namespace {

std::string read(const std::string& name) {
  std::ifstream in(std::string(SCENE_DIR) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

report::Report run(const std::string& text, const suites::RunOptions& opts = {}) {
  return suites::run_suites(scene::parse_scene(text), opts);
}

}  // namespace

TEST_CASE("sphere with every suite passes") {
  const auto r = run(read("sphere_parallel.scene"));
  CHECK(r.error == "");
  CHECK(r.exit_code == 0);
  CHECK(r.all_pass());
  CHECK(r.sign == 1);
  CHECK(r.rank_min == 3);
  CHECK(r.rank_max == 3);
  for (const char* name : {"gauss", "codazzi_Q", "commutator", "deformed_curvature", "metric_realization",
                           "shape_operator", "wedge", "gauss_map", "omega_loop", "path_vs_closed", "gauge_fit"}) {
    CAPTURE(name);
    CHECK(r.find(name) != nullptr);
  }
}

TEST_CASE("reports are deterministic") {
  const std::string text = read("sphere_parallel.scene");
  const auto a = run(text), b = run(text);
  CHECK(report::to_text(a, false) == report::to_text(b, false));
  CHECK(report::to_json(a, false) == report::to_json(b, false));
}

TEST_CASE("rank gate") {
  const auto r = run(read("plane_parallel.scene"));
  CHECK(r.exit_code == suites::kHypothesisViolation);
  CHECK(r.error.find("rank A >= 3 violated") != std::string::npos);
  CHECK(r.error.find("check rank_A at u = (") != std::string::npos);
}

TEST_CASE("surfaces run with a warning") {
  const auto r = run("[chart]\ncatalog=torus2 R=2 r=1\n[codazzi]\nvariant=parallel t=0.3\n[run]\ngrid=5\n");
  CHECK(r.exit_code == 0);
  CHECK(r.rank_min == 2);
  REQUIRE_FALSE(r.warnings.empty());
  CHECK(r.warnings[0].find("rank") != std::string::npos);
}

TEST_CASE("non-commuting Q fails the commutator and realization checks") {
  const auto r = run(read("non_commuting.scene"));
  CHECK(r.exit_code == suites::kVerificationFailure);
  const auto* comm = r.find("commutator");
  const auto* real = r.find("path_metric_realization");
  REQUIRE(comm);
  REQUIRE(real);
  CHECK_FALSE(comm->pass);
  CHECK_FALSE(real->pass);
  CHECK(comm->max_residual > 1e-3);
  CHECK(real->max_residual > 1e-3);
}

TEST_CASE("explicit Q without closed form goes through path integration") {
  // Q = 2 Id is Codazzi and commutes with everything
  std::string text = "[chart]\ncatalog=graph3 phi=\"u1^2 + 2*u2^2 + 3*u3^2\"\n[codazzi]\nvariant=explicit\n";
  for (int k = 1; k <= 3; ++k)
    for (int j = 1; j <= 3; ++j) text += fmt::format("q{}{}={}\n", k, j, k == j ? "2" : "0");
  text += "[run]\ngrid=5 suites=codazzi,deformation\n";
  const auto r = run(text);
  CHECK(r.exit_code == 0);
  CHECK(r.find("path_metric_realization") != nullptr);
  CHECK(r.find("omega_loop") != nullptr);
}

TEST_CASE("gradient pair that violates its constraint") {
  const auto r = run(
      "[chart]\ncatalog=graph3 phi=\"u1^2 + 2*u2^2 + 3*u3^2\"\n[codazzi]\nvariant=gh g=\"(u1^2 + u2^2 + u3^2) / 2\" h=1\n[run]\ngrid=3 "
      "suites=codazzi\n");
  CHECK(r.exit_code == suites::kVerificationFailure);
  const auto* c = r.find("gh_constraint");
  REQUIRE(c);
  CHECK_FALSE(c->pass);
}

TEST_CASE("singular Q is a hypothesis violation") {
  const auto r = run("[chart]\ncatalog=sphere3 r=2\n[codazzi]\nvariant=parallel t=-2\n[run]\ngrid=3 suites=codazzi\n");
  CHECK(r.exit_code == suites::kHypothesisViolation);
  CHECK(r.error.find("at u = (") != std::string::npos);
}

TEST_CASE("options") {
  const std::string text = read("sphere_parallel.scene");
  suites::RunOptions single;
  single.point = std::vector<double>{0.7, 0.7, 0.7};
  auto r = run(text, single);
  CHECK(r.exit_code == 0);
  CHECK(r.find("gauss")->samples == 1);
  CHECK(r.find("gauss")->worst_point == *single.point);
  CHECK_FALSE(r.warnings.empty());

  suites::RunOptions tight;
  tight.tolerances["gauss"] = 1e-30;
  r = run(text, tight);
  CHECK(r.exit_code == suites::kVerificationFailure);
  CHECK_FALSE(r.find("gauss")->pass);

  suites::RunOptions unknown;
  unknown.tolerances["no_such_check"] = 1;
  CHECK(run(text, unknown).exit_code == suites::kOtherError);

  suites::RunOptions outside;
  outside.point = std::vector<double>{5, 5, 5};
  CHECK(run(text, outside).exit_code == suites::kOtherError);

  suites::RunOptions coarse;
  coarse.grid = 3;
  CHECK(run(text, coarse).find("gauss")->samples == 27);
}

TEST_CASE("rank tolerance override") {
  // with an absurd relative threshold every singular value but the largest is dropped
  suites::RunOptions opts;
  opts.tolerances["rank"] = 2.0;
  const auto r = run("[chart]\ncatalog=sphere3 r=2\n[codazzi]\nvariant=parallel t=1\n[run]\ngrid=3 suites=deformation\n", opts);
  CHECK(r.exit_code == suites::kHypothesisViolation);
}

TEST_CASE("path grid size") {
  CHECK(suites::path_grid_count(3, 9) == 9);
  CHECK(suites::path_grid_count(4, 9) == 5);
  CHECK(suites::path_grid_count(4, 3) == 3);
}
