#include "nulldist/scene.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace nulldist {

using nlohmann::json;

bool operator==(const SpacetimeSpec& a, const SpacetimeSpec& b) {
  if (a.name != b.name || a.params != b.params) return false;
  if (!a.base || !b.base) return !a.base && !b.base;
  return *a.base == *b.base;
}

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw Error(Errc::SceneParse, where + ": " + what);
}

void allow_keys(const json& obj, const std::string& where, std::set<std::string> keys) {
  if (!obj.is_object()) fail(where, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (!keys.count(key)) fail(where, "unknown key '" + key + "'");
  }
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  return j.get<int>();
}

std::string string(const json& j, const std::string& where) {
  if (!j.is_string()) fail(where, "expected a string");
  return j.get<std::string>();
}

Coords coords(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of numbers");
  Coords c;
  for (std::size_t i = 0; i < j.size(); ++i) {
    c.push_back(number(j[i], where + "[" + std::to_string(i) + "]"));
  }
  return c;
}

std::map<std::string, double> numeric_params(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  std::map<std::string, double> out;
  for (const auto& [key, value] : j.items()) out[key] = number(value, where + "." + key);
  return out;
}

SpacetimeSpec spacetime_spec(const json& j, const std::string& where) {
  allow_keys(j, where, {"name", "params", "base"});
  if (!j.contains("name")) fail(where, "missing 'name'");
  SpacetimeSpec s;
  s.name = string(j["name"], where + ".name");
  if (j.contains("params")) s.params = numeric_params(j["params"], where + ".params");
  if (j.contains("base")) {
    s.base = std::make_shared<SpacetimeSpec>(spacetime_spec(j["base"], where + ".base"));
  }
  return s;
}

json spacetime_json(const SpacetimeSpec& s) {
  json j = {{"name", s.name}};
  if (!s.params.empty()) j["params"] = s.params;
  if (s.base) j["base"] = spacetime_json(*s.base);
  return j;
}

std::string line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

}  // namespace

Scene parse_scene(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    std::string msg = e.what();
    const auto colon = msg.find("syntax error");
    if (colon != std::string::npos) msg = msg.substr(colon);
    throw Error(Errc::SceneParse, line_column(text, e.byte) + ": " + msg);
  }

  allow_keys(root, "scene",
             {"schema", "dim", "spacetime", "time_function", "grid", "queries", "outputs"});
  Scene s;
  if (!root.contains("schema")) fail("scene", "missing 'schema'");
  s.schema = integer(root["schema"], "schema");
  if (s.schema != 1) fail("schema", "unsupported schema " + std::to_string(s.schema));
  if (!root.contains("dim")) fail("scene", "missing 'dim'");
  s.dim = integer(root["dim"], "dim");
  if (s.dim < 2 || s.dim > kMaxDim) fail("dim", "must be between 2 and " + std::to_string(kMaxDim));
  if (!root.contains("spacetime")) fail("scene", "missing 'spacetime'");
  s.spacetime = spacetime_spec(root["spacetime"], "spacetime");

  if (root.contains("time_function")) {
    const auto& t = root["time_function"];
    allow_keys(t, "time_function", {"name", "params"});
    if (t.contains("name")) s.time.name = string(t["name"], "time_function.name");
    if (t.contains("params")) s.time.params = numeric_params(t["params"], "time_function.params");
  }

  auto check_dim = [&](const Coords& c, const std::string& where) {
    if (static_cast<int>(c.size()) != s.dim) {
      fail(where, "expected " + std::to_string(s.dim) + " coordinates");
    }
    return c;
  };

  if (root.contains("grid")) {
    const auto& g = root["grid"];
    allow_keys(g, "grid", {"lo", "hi", "h", "stencil_radius"});
    if (g.contains("lo")) s.grid.lo = check_dim(coords(g["lo"], "grid.lo"), "grid.lo");
    if (g.contains("hi")) s.grid.hi = check_dim(coords(g["hi"], "grid.hi"), "grid.hi");
    if (s.grid.lo.has_value() != s.grid.hi.has_value()) fail("grid", "lo and hi go together");
    if (g.contains("h")) s.grid.h = number(g["h"], "grid.h");
    if (!(s.grid.h > 0.0)) fail("grid.h", "must be positive");
    if (g.contains("stencil_radius")) {
      s.grid.stencil_radius = integer(g["stencil_radius"], "grid.stencil_radius");
    }
    if (s.grid.stencil_radius < 1) fail("grid.stencil_radius", "must be at least 1");
  }

  if (root.contains("queries")) {
    const auto& q = root["queries"];
    allow_keys(q, "queries", {"pairs", "balls", "charts"});
    if (q.contains("pairs")) {
      if (!q["pairs"].is_array()) fail("queries.pairs", "expected an array");
      for (std::size_t i = 0; i < q["pairs"].size(); ++i) {
        const std::string where = "queries.pairs[" + std::to_string(i) + "]";
        const auto& item = q["pairs"][i];
        allow_keys(item, where, {"p", "q"});
        if (!item.contains("p") || !item.contains("q")) fail(where, "needs 'p' and 'q'");
        s.pairs.push_back({check_dim(coords(item["p"], where + ".p"), where + ".p"),
                           check_dim(coords(item["q"], where + ".q"), where + ".q")});
      }
    }
    if (q.contains("balls")) {
      if (!q["balls"].is_array()) fail("queries.balls", "expected an array");
      for (std::size_t i = 0; i < q["balls"].size(); ++i) {
        const std::string where = "queries.balls[" + std::to_string(i) + "]";
        const auto& item = q["balls"][i];
        allow_keys(item, where, {"center", "radius", "n_dirs"});
        if (!item.contains("center")) fail(where, "needs 'center'");
        BallQuery b;
        b.center = check_dim(coords(item["center"], where + ".center"), where + ".center");
        if (item.contains("radius")) b.radius = number(item["radius"], where + ".radius");
        if (item.contains("n_dirs")) b.n_dirs = integer(item["n_dirs"], where + ".n_dirs");
        s.balls.push_back(b);
      }
    }
    if (q.contains("charts")) {
      if (!q["charts"].is_array()) fail("queries.charts", "expected an array");
      for (std::size_t i = 0; i < q["charts"].size(); ++i) {
        const std::string where = "queries.charts[" + std::to_string(i) + "]";
        const auto& item = q["charts"][i];
        allow_keys(item, where, {"center", "sense", "eps"});
        if (!item.contains("center")) fail(where, "needs 'center'");
        ChartQuery c;
        c.center = check_dim(coords(item["center"], where + ".center"), where + ".center");
        if (item.contains("sense")) c.sense = string(item["sense"], where + ".sense");
        if (c.sense != "future" && c.sense != "past") fail(where + ".sense", "future or past");
        if (item.contains("eps")) c.eps = number(item["eps"], where + ".eps");
        s.charts.push_back(c);
      }
    }
  }

  if (root.contains("outputs")) {
    const auto& o = root["outputs"];
    if (!o.is_object()) fail("outputs", "expected an object");
    for (const auto& [key, value] : o.items()) s.outputs[key] = string(value, "outputs." + key);
  }
  return s;
}

Scene load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::SceneParse, "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scene(buf.str());
}

std::string emit_scene(const Scene& s) {
  json root = {{"schema", s.schema}, {"dim", s.dim}, {"spacetime", spacetime_json(s.spacetime)}};
  json t = {{"name", s.time.name}};
  if (!s.time.params.empty()) t["params"] = s.time.params;
  root["time_function"] = t;
  json g = {{"h", s.grid.h}, {"stencil_radius", s.grid.stencil_radius}};
  if (s.grid.lo) g["lo"] = *s.grid.lo;
  if (s.grid.hi) g["hi"] = *s.grid.hi;
  root["grid"] = g;
  json q = json::object();
  if (!s.pairs.empty()) {
    q["pairs"] = json::array();
    for (const auto& p : s.pairs) q["pairs"].push_back({{"p", p.p}, {"q", p.q}});
  }
  if (!s.balls.empty()) {
    q["balls"] = json::array();
    for (const auto& b : s.balls) {
      q["balls"].push_back({{"center", b.center}, {"radius", b.radius}, {"n_dirs", b.n_dirs}});
    }
  }
  if (!s.charts.empty()) {
    q["charts"] = json::array();
    for (const auto& c : s.charts) {
      q["charts"].push_back({{"center", c.center}, {"sense", c.sense}, {"eps", c.eps}});
    }
  }
  if (!q.empty()) root["queries"] = q;
  if (!s.outputs.empty()) root["outputs"] = s.outputs;
  return root.dump(2) + "\n";
}

Spacetime make_spacetime(const SpacetimeSpec& spec, int dim) {
  BuiltinParams params;
  params.dim = dim;
  params.values = spec.params;
  if (spec.name == "conformal") {
    if (!spec.base) throw Error(Errc::InvalidArgument, "conformal needs a 'base' spacetime");
    const Spacetime base = make_spacetime(*spec.base, dim);
    params.base = &base;
    return builtin(spec.name, params);
  }
  return builtin(spec.name, params);
}

Spacetime make_spacetime(const Scene& scene) { return make_spacetime(scene.spacetime, scene.dim); }

Vector to_vector(const Coords& c) {
  if (c.empty() || c.size() > static_cast<std::size_t>(kMaxDim)) {
    throw Error(Errc::InvalidArgument, "coordinate count out of range");
  }
  Vector v(static_cast<Eigen::Index>(c.size()));
  for (std::size_t i = 0; i < c.size(); ++i) v[static_cast<Eigen::Index>(i)] = c[i];
  return v;
}

Coords to_coords(const Vector& v) { return Coords(v.data(), v.data() + v.size()); }

Box scene_box(const Scene& scene) {
  if (!scene.grid.lo || !scene.grid.hi) {
    throw Error(Errc::InvalidArgument, "scene has no grid box");
  }
  return Box{to_vector(*scene.grid.lo), to_vector(*scene.grid.hi)};
}

StencilSpec scene_stencil(const Scene& scene) {
  StencilSpec s;
  s.radius = scene.grid.stencil_radius;
  return s;
}

TimeFunction make_time_function(const Scene& scene, const Spacetime& st, int threads) {
  const auto& name = scene.time.name;
  auto param = [&](const std::string& key, double fallback) {
    auto it = scene.time.params.find(key);
    return it == scene.time.params.end() ? fallback : it->second;
  };
  if (name == "coordinate") return coordinate_time(st);
  if (name == "cubed") return cubed_time(st);
  if (name == "affine") return affine_time(st, param("a", 1.0), param("b", 0.0));
  if (name == "cosmological") return analytic_cosmological_time(st);
  if (name == "cosmological_numeric") {
    const auto helper = build_grid(st, coordinate_time(st), scene_box(scene), scene.grid.h,
                                   scene_stencil(scene), threads);
    return time_function_from_nodes(helper, cosmological_time_numeric(helper),
                                    "cosmological_numeric", {true, true, false, true});
  }
  throw Error(Errc::UnknownName, "unknown time function '" + name + "'");
}

}  // namespace nulldist
