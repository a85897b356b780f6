#include <doctest.h>

#include <cmath>

#include <json.hpp>

#include "isodeform/report.hpp"

using namespace isodeform;
using report::Accumulator;

TEST_CASE("verdict is max <= tolerance") {
  Accumulator a("gauss", "geometry", 1e-8);
  a.add(1e-9, {0.1, 0.2});
  a.add(1e-8, {0.3, 0.4});
  a.add(5e-9, {0.5, 0.6});
  const auto c = a.finish();
  CHECK(c.pass);
  CHECK(c.max_residual == 1e-8);
  CHECK(c.mean_residual == doctest::Approx((1e-9 + 1e-8 + 5e-9) / 3));
  CHECK(c.worst_point == std::vector<double>{0.3, 0.4});
  CHECK(c.samples == 3);

  Accumulator b("gauss", "geometry", 1e-8);
  b.add(1.0000001e-8, {0});
  CHECK_FALSE(b.finish().pass);

  Accumulator n("gauss", "geometry", 1.0);
  n.add(0.5, {0});
  n.add(NAN, {1});
  const auto nc = n.finish();
  CHECK_FALSE(nc.pass);
  CHECK(std::isinf(nc.max_residual));
  CHECK(nc.worst_point == std::vector<double>{1});
}

namespace {

report::Report sample_report() {
  report::Report r;
  r.chart = "sphere3(r=2)";
  r.spec = "parallel(t=1)";
  r.grid = 9;
  r.order = 3;
  r.rank_min = 3;
  r.rank_max = 3;
  r.sign = 1;
  r.wall_time = 1.25;
  Accumulator a("gauss", "geometry", 1e-8);
  a.add(2e-15, {0.4, 0.5, 0.6});
  r.checks.push_back(a.finish());
  Accumulator b("kernel_angle", "deformation", 1e-6);
  b.add(INFINITY, {0.4, 0.5, 0.6});
  r.checks.push_back(b.finish("rank mismatch"));
  r.warnings.push_back("something to note");
  r.exit_code = 2;
  return r;
}

}  // namespace

TEST_CASE("text form") {
  const auto r = sample_report();
  const auto text = report::to_text(r);
  CHECK(text.find("[report]") == 0);
  CHECK(text.find("chart: sphere3(r=2)") != std::string::npos);
  CHECK(text.find("rank_A: 3..3") != std::string::npos);
  CHECK(text.find("sign: +1") != std::string::npos);
  CHECK(text.find("max: 2.000000e-15") != std::string::npos);
  CHECK(text.find("verdict: fail") != std::string::npos);
  CHECK(text.find("wall_time") != std::string::npos);
  CHECK(report::to_text(r, false).find("wall_time") == std::string::npos);

  auto r2 = sample_report();
  r2.wall_time = 99;
  CHECK(report::to_text(r, false) == report::to_text(r2, false));
  CHECK(r.find("gauss") == &r.checks[0]);
  CHECK(r.find("nothing") == nullptr);
  CHECK_FALSE(r.all_pass());
}

TEST_CASE("json form") {
  const auto r = sample_report();
  const auto j = nlohmann::json::parse(report::to_json(r));
  CHECK(j["chart"] == "sphere3(r=2)");
  CHECK(j["checks"].size() == 2);
  CHECK(j["checks"][0]["name"] == "gauss");
  CHECK(j["checks"][0]["verdict"] == "pass");
  CHECK(j["checks"][1]["max"].is_null());
  CHECK(j["exit_code"] == 2);
  CHECK(report::to_json(r, false).find("wall_time") == std::string::npos);
}

TEST_CASE("sci") {
  CHECK(report::sci(1.5e-9) == "1.500000e-09");
  CHECK(report::sci(0) == "0.000000e+00");
}
