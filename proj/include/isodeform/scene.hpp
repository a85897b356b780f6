#pragma once

// Scene files: a chart, a Codazzi spec and run settings.
//
//   [chart]
//   catalog=sphere3 r=2
//   [codazzi]
//   variant=parallel t=1
//   [run]
//   grid=9 suites=geometry,codazzi,deformation
//
// Lines hold one or more key=value pairs. A value is either double-quoted or
// runs up to the next " key=" token (or the end of the line). '#' starts a
// comment outside quotes.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "isodeform/codazzi.hpp"
#include "isodeform/deformation.hpp"

namespace isodeform::scene {

enum class Suite { Geometry, Codazzi, Deformation, Roundtrip };

const char* suite_name(Suite s);

struct Scene {
  geometry::Chart chart;
  std::string catalog;  // empty for inline charts
  codazzi::CodazziSpec spec = codazzi::Parallel{0.0};
  std::string variant;  // as written in the scene
  // (g, h) pair with a closed-form F, when the variant has one
  std::optional<deformation::GHPairData> pair;
  int grid = 9;
  int order = 3;
  std::map<std::string, double> tolerances;
  std::vector<Suite> suites;
  std::vector<int> project{1, 2, 3};  // ambient axes kept by mesh export, 1-based
  std::vector<std::string> warnings;
};

/// Throws ParseError (offset = 1-based line number, 0 for whole-file errors).
Scene parse_scene(const std::string& text);
Scene load_scene(const std::string& path);

/// Default tolerance table; keys are check names.
const std::map<std::string, double>& default_tolerances();

/// Splits "key=value key2="quoted value"" into pairs. Exposed for tests.
std::vector<std::pair<std::string, std::string>> split_pairs(const std::string& line, std::size_t line_no);

}  // namespace isodeform::scene
