#pragma once

// Wavefront OBJ export of f and F over a two-parameter family of grid
// points: the chart itself for n = 2, or a slice with n - 2 coordinates fixed.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "isodeform/scene.hpp"

namespace isodeform::mesh {

struct MeshOptions {
  std::map<int, double> slice;  // 0-based axis -> fixed value
  std::vector<int> project;     // 3 ambient axes, 1-based; empty = scene's
  std::optional<int> grid;      // points per free axis; default = scene grid
};

/// Parses "u3=0.7" or "u3=0.7,u4=0" into a slice map. Throws ParseError.
std::map<int, double> parse_slice(const std::string& text, int n);
/// Parses "1,2,3". Throws ParseError.
std::vector<int> parse_projection(const std::string& text, int ambient_dim);

/// Two objects, "f" and "F", each with grid^2 vertices and (grid-1)^2 quads.
/// F uses the closed form when the scene has one, else the path integral
/// from the first vertex.
std::string mesh_obj(const scene::Scene& scene, const MeshOptions& options);
void export_mesh(const scene::Scene& scene, const std::string& out_path, const MeshOptions& options);

}  // namespace isodeform::mesh
