#include "isodeform/scene.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "isodeform/catalog.hpp"
#include "isodeform/error.hpp"

namespace isodeform::scene {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.'; }

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

// Position of " key=" after `from`, or npos.
std::size_t next_key(const std::string& line, std::size_t from) {
  for (std::size_t i = from; i < line.size(); ++i) {
    if (line[i] == '#') return i;
    if (!std::isspace(static_cast<unsigned char>(line[i]))) continue;
    std::size_t j = i;
    while (j < line.size() && std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j >= line.size() || !ident_start(line[j])) continue;
    std::size_t k = j;
    while (k < line.size() && ident_char(line[k])) ++k;
    if (k < line.size() && line[k] == '=') return i;
  }
  return std::string::npos;
}

double to_number(const std::string& key, const std::string& value, std::size_t line) {
  double x = 0;
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, x);
  if (ec != std::errc() || ptr != end)
    throw ParseError(fmt::format("line {}: {}: expected a number, got '{}'", line, key, value), line);
  return x;
}

int to_int(const std::string& key, const std::string& value, std::size_t line) {
  int x = 0;
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, x);
  if (ec != std::errc() || ptr != end)
    throw ParseError(fmt::format("line {}: {}: expected an integer, got '{}'", line, key, value), line);
  return x;
}

std::vector<double> to_numbers(const std::string& key, const std::string& value, std::size_t line) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_number(key, trim(item), line));
  return out;
}

struct Entry {
  std::string value;
  std::size_t line;
  bool used = false;
};

// Key/value pairs of one section, with usage tracking so unknown keys can be
// reported.
class Section {
 public:
  explicit Section(std::string name, std::size_t line) : name_(std::move(name)), line_(line) {}

  void add(const std::string& key, std::string value, std::size_t line) {
    if (entries_.count(key))
      throw ParseError(fmt::format("line {}: duplicate key '{}' in [{}]", line, key, name_), line);
    entries_.emplace(key, Entry{std::move(value), line});
  }
  bool has(const std::string& key) const { return entries_.count(key) > 0; }
  const Entry* find(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return nullptr;
    it->second.used = true;
    return &it->second;
  }
  const Entry& require(const std::string& key) {
    const Entry* e = find(key);
    if (!e) throw ParseError(fmt::format("line {}: [{}] needs key '{}'", line_, name_, key), line_);
    return *e;
  }
  double number(const std::string& key, double fallback) {
    const Entry* e = find(key);
    return e ? to_number(key, e->value, e->line) : fallback;
  }
  std::vector<std::string> keys() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : entries_) out.push_back(k);
    return out;
  }
  void reject_unused() const {
    for (const auto& [k, e] : entries_)
      if (!e.used) throw ParseError(fmt::format("line {}: unknown key '{}' in [{}]", e.line, k, name_), e.line);
  }
  std::size_t line() const { return line_; }

 private:
  std::string name_;
  std::size_t line_;
  std::map<std::string, Entry> entries_;
};

expr::ExprAst parse_expr(const Entry& e, const std::string& key, int n) {
  try {
    return expr::parse(e.value, n);
  } catch (const ParseError& err) {
    throw ParseError(fmt::format("line {}: {}: {} (column {} of the expression)", e.line, key, err.what(),
                                 err.offset() + 1),
                     e.line);
  }
}

Box parse_domain(Section& s, int n) {
  Box box{std::vector<double>(n), std::vector<double>(n)};
  const Entry* all = s.find("domain");
  for (int i = 0; i < n; ++i) {
    const std::string key = fmt::format("domain{}", i + 1);
    const Entry* e = s.find(key);
    if (!e) e = all;
    if (!e) throw ParseError(fmt::format("line {}: [chart] needs 'domain' or '{}'", s.line(), key), s.line());
    const auto v = to_numbers(key, e->value, e->line);
    if (v.size() != 2 || !(v[0] < v[1]))
      throw ParseError(fmt::format("line {}: {}: expected \"lo,hi\" with lo < hi", e->line, key), e->line);
    box.lo[i] = v[0];
    box.hi[i] = v[1];
  }
  return box;
}

geometry::Chart parse_chart(Section& s, std::string& catalog_name) {
  if (const Entry* c = s.find("catalog")) {
    catalog_name = c->value;
    const std::string& name = catalog_name;
    if (name == "plane2") return catalog::plane2();
    if (name == "flat") return catalog::flat(static_cast<int>(s.number("n", 2)));
    if (name == "torus2") return catalog::torus2(s.number("R", 2.0), s.number("r", 1.0));
    if (name == "sphere3") return catalog::sphere3(s.number("r", 1.0));
    if (name == "ellipsoid3")
      return catalog::ellipsoid3(s.number("a", 2.0), s.number("b", 1.5), s.number("c", 1.0), s.number("d", 1.0));
    if (name == "graph3") {
      const Entry& phi = s.require("phi");
      parse_expr(phi, "phi", 3);
      return catalog::graph3(phi.value);
    }
    if (name == "sphcyl4") return catalog::sphcyl4(s.number("r", 1.0));
    throw ParseError(fmt::format("line {}: unknown catalog chart '{}'", c->line, name), c->line);
  }
  const Entry& ne = s.require("n");
  const int n = to_int("n", ne.value, ne.line);
  if (n < 1 || n > 7) throw ParseError(fmt::format("line {}: n must be in 1..7", ne.line), ne.line);
  geometry::Chart chart;
  chart.n = n;
  chart.label = s.has("label") ? s.find("label")->value : "inline";
  for (int a = 1; a <= n + 1; ++a) {
    const std::string key = fmt::format("f{}", a);
    chart.components.push_back(parse_expr(s.require(key), key, n));
  }
  chart.domain = parse_domain(s, n);
  chart.validate();
  return chart;
}

void parse_codazzi(Section& s, Scene& scene) {
  const int n = scene.chart.n;
  const Entry& v = s.require("variant");
  scene.variant = v.value;
  const std::string& name = v.value;
  if (name == "parallel") {
    const double t = s.number("t", 0.0);
    scene.spec = codazzi::Parallel{t};
    scene.pair = deformation::gh_from_example5(scene.chart, t);
  } else if (name == "minusA") {
    scene.spec = codazzi::MinusA{};
    scene.pair = deformation::gh_from_example6(scene.chart, std::vector<double>(n + 1, 0.0));
  } else if (name == "support") {
    scene.pair = deformation::gh_from_example5(scene.chart, s.number("t", 0.0));
    scene.spec = scene.pair->spec();
  } else if (name == "translate") {
    const Entry& a = s.require("a");
    const auto av = to_numbers("a", a.value, a.line);
    if (static_cast<int>(av.size()) != n + 1)
      throw ParseError(fmt::format("line {}: a needs {} entries", a.line, n + 1), a.line);
    scene.pair = deformation::gh_from_example6(scene.chart, av);
    scene.spec = scene.pair->spec();
  } else if (name == "gh") {
    const Entry& g = s.require("g");
    const Entry& h = s.require("h");
    codazzi::GHPair pair{geometry::ScalarField::expression(parse_expr(g, "g", n)),
                         geometry::ScalarField::expression(parse_expr(h, "h", n))};
    scene.spec = pair;
    scene.pair = deformation::gh_user(std::move(pair));
  } else if (name == "explicit") {
    codazzi::Explicit q;
    for (int k = 1; k <= n; ++k)
      for (int j = 1; j <= n; ++j) {
        const std::string key = fmt::format("q{}{}", k, j);
        q.entries.push_back(parse_expr(s.require(key), key, n));
      }
    scene.spec = q;
    // self-adjointness is enforced at run time; flag it early at the center
    std::vector<double> center(n);
    for (int i = 0; i < n; ++i) center[i] = 0.5 * (scene.chart.domain.lo[i] + scene.chart.domain.hi[i]);
    const auto frame = geometry::frame_at(scene.chart, center, 2);
    const auto qv = jetmat::values(codazzi::codazzi_jets(geometry::chart_jets(scene.chart, center, 2), center, q));
    if (geometry::self_adjoint_residual(frame.g, qv) > 1e-10 * std::max(1.0, frame.g.max_abs() * qv.max_abs()))
      scene.warnings.push_back("explicit Q is not g-self-adjoint at the domain center");
  } else {
    throw ParseError(fmt::format("line {}: unknown variant '{}'", v.line, name), v.line);
  }
}

void parse_run(Section& s, Scene& scene) {
  if (const Entry* e = s.find("grid")) {
    scene.grid = to_int("grid", e->value, e->line);
    if (scene.grid < 3) throw ParseError(fmt::format("line {}: grid must be at least 3", e->line), e->line);
  }
  if (const Entry* e = s.find("order")) {
    scene.order = to_int("order", e->value, e->line);
    if (scene.order < 3 || scene.order > 4)
      throw ParseError(fmt::format("line {}: order must be 3 or 4", e->line), e->line);
  }
  if (const Entry* e = s.find("suites")) {
    scene.suites.clear();
    std::stringstream ss(e->value);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item == "all") {
        scene.suites = {Suite::Geometry, Suite::Codazzi, Suite::Deformation, Suite::Roundtrip};
        continue;
      }
      bool found = false;
      for (Suite su : {Suite::Geometry, Suite::Codazzi, Suite::Deformation, Suite::Roundtrip})
        if (item == suite_name(su)) {
          if (std::find(scene.suites.begin(), scene.suites.end(), su) == scene.suites.end()) scene.suites.push_back(su);
          found = true;
        }
      if (!found) throw ParseError(fmt::format("line {}: unknown suite '{}'", e->line, item), e->line);
    }
  }
  if (const Entry* e = s.find("project")) {
    scene.project.clear();
    for (double x : to_numbers("project", e->value, e->line)) scene.project.push_back(static_cast<int>(x));
    for (int p : scene.project)
      if (p < 1 || p > scene.chart.ambient_dim())
        throw ParseError(fmt::format("line {}: project axis {} out of range", e->line, p), e->line);
    if (scene.project.size() != 3) throw ParseError(fmt::format("line {}: project needs 3 axes", e->line), e->line);
  }
  for (const auto& key : s.keys()) {
    if (key.rfind("tol.", 0) != 0) continue;
    const Entry* e = s.find(key);
    const std::string name = key.substr(4);
    if (!default_tolerances().count(name))
      throw ParseError(fmt::format("line {}: unknown tolerance '{}'", e->line, name), e->line);
    const double x = to_number(key, e->value, e->line);
    if (!(x > 0)) throw ParseError(fmt::format("line {}: tolerance {} must be positive", e->line, name), e->line);
    scene.tolerances[name] = x;
  }
}

}  // namespace

const char* suite_name(Suite s) {
  switch (s) {
    case Suite::Geometry: return "geometry";
    case Suite::Codazzi: return "codazzi";
    case Suite::Deformation: return "deformation";
    case Suite::Roundtrip: return "roundtrip";
  }
  return "?";
}

const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> table{
      {"weingarten", 1e-8},
      {"gauss", 1e-8},
      {"codazzi_A", 1e-8},
      {"metric_compatibility", 1e-8},
      {"bianchi", 1e-8},
      {"A_self_adjoint", 1e-9},
      {"jet_vs_fd", 1e-5},
      {"gh_constraint", 1e-8},
      {"Q_self_adjoint", 1e-9},
      {"codazzi_Q", 1e-8},
      {"commutator", 1e-9},
      {"deformed_connection", 1e-7},
      {"deformed_curvature", 1e-6},
      {"pair_matches_spec", 1e-8},
      {"closed_form_idempotence", 1e-12},
      {"metric_realization", 1e-9},
      {"differential", 1e-9},
      {"shape_operator", 1e-9},
      {"sign_constancy", 0.5},
      {"A_tilde_self_adjoint", 1e-9},
      {"A_tilde_codazzi", 1e-6},
      {"wedge", 1e-9},
      {"kernel_angle", 1e-6},
      {"gauss_map", 1e-9},
      {"omega_loop", 1e-9},
      {"path_vs_closed", 1e-7},
      {"path_order_swap", 1e-8},
      {"path_metric_realization", 1e-6},
      {"path_differential", 1e-6},
      {"extract_closedness", 1e-6},
      {"extract_constraint", 1e-5},
      {"gauge_fit", 1e-6},
      {"gauge_shift", 1e-8},
      {"rank", 1e-9},  // relative to the largest singular value of A
  };
  return table;
}

std::vector<std::pair<std::string, std::string>> split_pairs(const std::string& line, std::size_t line_no) {
  std::vector<std::pair<std::string, std::string>> out;
  std::size_t i = 0;
  auto skip_space = [&] {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
  };
  skip_space();
  while (i < line.size() && line[i] != '#') {
    if (!ident_start(line[i]))
      throw ParseError(fmt::format("line {}: expected key=value at column {}", line_no, i + 1), line_no);
    const std::size_t key_start = i;
    while (i < line.size() && ident_char(line[i])) ++i;
    const std::string key = line.substr(key_start, i - key_start);
    if (i >= line.size() || line[i] != '=')
      throw ParseError(fmt::format("line {}: expected '=' after '{}'", line_no, key), line_no);
    ++i;
    std::string value;
    if (i < line.size() && line[i] == '"') {
      const std::size_t close = line.find('"', i + 1);
      if (close == std::string::npos)
        throw ParseError(fmt::format("line {}: unterminated quote in '{}'", line_no, key), line_no);
      value = line.substr(i + 1, close - i - 1);
      i = close + 1;
      if (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])) && line[i] != '#')
        throw ParseError(fmt::format("line {}: junk after quoted value of '{}'", line_no, key), line_no);
    } else {
      const std::size_t end = next_key(line, i);
      const std::size_t stop = end == std::string::npos ? line.size() : end;
      value = trim(std::string_view(line).substr(i, stop - i));
      i = stop;
    }
    if (value.empty()) throw ParseError(fmt::format("line {}: empty value for '{}'", line_no, key), line_no);
    out.emplace_back(key, std::move(value));
    skip_space();
  }
  return out;
}

Scene parse_scene(const std::string& text) {
  std::map<std::string, Section> sections;
  Section* current = nullptr;
  std::stringstream ss(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(ss, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (line[0] == '[') {
      const std::size_t close = line.find(']');
      if (close == std::string::npos || trim(line.substr(close + 1)).size() > 0)
        throw ParseError(fmt::format("line {}: malformed section header '{}'", line_no, line), line_no);
      const std::string name = trim(line.substr(1, close - 1));
      if (name != "chart" && name != "codazzi" && name != "run")
        throw ParseError(fmt::format("line {}: unknown section '{}'", line_no, name), line_no);
      if (sections.count(name)) throw ParseError(fmt::format("line {}: duplicate section [{}]", line_no, name), line_no);
      current = &sections.emplace(name, Section(name, line_no)).first->second;
      continue;
    }
    if (!current) throw ParseError(fmt::format("line {}: key outside of any section", line_no), line_no);
    for (auto& [k, v] : split_pairs(line, line_no)) current->add(k, std::move(v), line_no);
  }

  Scene scene;
  auto chart_it = sections.find("chart");
  if (chart_it == sections.end()) throw ParseError("missing section: chart", 0);
  scene.chart = parse_chart(chart_it->second, scene.catalog);
  chart_it->second.reject_unused();

  scene.suites = {Suite::Geometry, Suite::Codazzi, Suite::Deformation};
  if (auto it = sections.find("run"); it != sections.end()) {
    parse_run(it->second, scene);
    it->second.reject_unused();
  }
  if (auto it = sections.find("codazzi"); it != sections.end()) {
    parse_codazzi(it->second, scene);
    it->second.reject_unused();
  } else {
    const bool geometry_only = std::all_of(scene.suites.begin(), scene.suites.end(),
                                           [](Suite s) { return s == Suite::Geometry; });
    if (!geometry_only) throw ParseError("missing section: codazzi", 0);
  }
  return scene;
}

Scene load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot open scene file '{}'", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scene(ss.str());
}

}  // namespace isodeform::scene
