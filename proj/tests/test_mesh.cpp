#include <doctest.h>

#include <cmath>
#include <sstream>

#include "isodeform/error.hpp"
#include "isodeform/mesh.hpp"

using namespace isodeform;

namespace {

struct Obj {
  std::vector<std::string> objects;
  std::vector<std::vector<double>> vertices;
  std::vector<std::vector<int>> faces;
};

Obj parse_obj(const std::string& text) {
  Obj obj;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "o") {
      std::string name;
      ls >> name;
      obj.objects.push_back(name);
    } else if (tag == "v") {
      std::vector<double> v(3);
      ls >> v[0] >> v[1] >> v[2];
      obj.vertices.push_back(v);
    } else if (tag == "f") {
      std::vector<int> f(4);
      ls >> f[0] >> f[1] >> f[2] >> f[3];
      obj.faces.push_back(f);
    }
  }
  return obj;
}

}  // namespace

TEST_CASE("torus: two nested meshes") {
  const auto sc = scene::parse_scene("[chart]\ncatalog=torus2 R=2 r=1\n[codazzi]\nvariant=parallel t=0.3\n[run]\ngrid=3\n");
  const auto obj = parse_obj(mesh::mesh_obj(sc, {}));
  CHECK(obj.objects == std::vector<std::string>{"f", "F"});
  REQUIRE(obj.vertices.size() == 18);
  CHECK(obj.faces.size() == 8);
  for (const auto& f : obj.faces)
    for (int idx : f) CHECK((idx >= 1 && idx <= 18));

  // distance from the core circle grows from 1 to 1.3
  const auto fine = parse_obj(mesh::mesh_obj(sc, {{}, {}, 7}));
  const std::size_t half = fine.vertices.size() / 2;
  for (std::size_t k = 0; k < half; ++k) {
    auto tube = [](const std::vector<double>& v) {
      const double rho = std::hypot(v[0], v[1]) - 2;
      return std::hypot(rho, v[2]);
    };
    CHECK(tube(fine.vertices[k]) == doctest::Approx(1).epsilon(1e-8));
    CHECK(tube(fine.vertices[half + k]) == doctest::Approx(1.3).epsilon(1e-8));
  }
}

TEST_CASE("sphere slice: concentric patches") {
  const auto sc = scene::parse_scene("[chart]\ncatalog=sphere3 r=2\n[codazzi]\nvariant=parallel t=1\n[run]\ngrid=4\n");
  mesh::MeshOptions opts;
  opts.slice = mesh::parse_slice("u3=0.7", 3);
  const auto obj = parse_obj(mesh::mesh_obj(sc, opts));
  const std::size_t half = obj.vertices.size() / 2;
  REQUIRE(half == 16);
  CHECK(obj.faces.size() == 18);
  for (std::size_t k = 0; k < half; ++k)
    for (int c = 0; c < 3; ++c) CHECK(obj.vertices[half + k][c] == doctest::Approx(1.5 * obj.vertices[k][c]).epsilon(1e-8));
}

TEST_CASE("path-integrated F when there is no closed form") {
  std::string text = "[chart]\ncatalog=torus2 R=2 r=1\n[codazzi]\nvariant=explicit q11=2 q12=0 q21=0 q22=2\n[run]\ngrid=4\n";
  const auto obj = parse_obj(mesh::mesh_obj(scene::parse_scene(text), {}));
  // F = f(first) + 2 (f - f(first))
  const std::size_t half = obj.vertices.size() / 2;
  for (std::size_t k = 0; k < half; ++k)
    for (int c = 0; c < 3; ++c)
      CHECK(obj.vertices[half + k][c] ==
            doctest::Approx(2 * obj.vertices[k][c] - obj.vertices[0][c]).epsilon(1e-7));
}

TEST_CASE("slice and projection parsing") {
  const auto s = mesh::parse_slice("u3=0.7,u4=0", 4);
  CHECK(s.at(2) == 0.7);
  CHECK(s.at(3) == 0.0);
  CHECK_THROWS_AS(mesh::parse_slice("u5=1", 4), ParseError);
  CHECK_THROWS_AS(mesh::parse_slice("x3=1", 4), ParseError);
  CHECK_THROWS_AS(mesh::parse_slice("u3=abc", 4), ParseError);
  CHECK_THROWS_AS(mesh::parse_slice("u3=1,u3=2", 4), ParseError);
  CHECK(mesh::parse_projection("1,2,4", 5) == std::vector<int>{1, 2, 4});
  CHECK_THROWS_AS(mesh::parse_projection("1,2", 5), ParseError);
  CHECK_THROWS_AS(mesh::parse_projection("1,2,6", 5), ParseError);
}

TEST_CASE("mesh errors") {
  const auto sc = scene::parse_scene("[chart]\ncatalog=sphere3 r=2\n[codazzi]\nvariant=parallel t=1\n");
  CHECK_THROWS_AS(mesh::mesh_obj(sc, {}), DimensionError);
  mesh::MeshOptions outside;
  outside.slice = mesh::parse_slice("u3=3", 3);
  CHECK_THROWS_AS(mesh::mesh_obj(sc, outside), DimensionError);
}
