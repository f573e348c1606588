#ifndef NULLDIST_SCENE_HPP
#define NULLDIST_SCENE_HPP

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nulldist/causal_grid.hpp"
#include "nulldist/spacetime.hpp"
#include "nulldist/time_function.hpp"

namespace nulldist {

using Coords = std::vector<double>;

struct SpacetimeSpec {
  std::string name;
  std::map<std::string, double> params;
  std::shared_ptr<SpacetimeSpec> base;  // conformal only

  friend bool operator==(const SpacetimeSpec& a, const SpacetimeSpec& b);
};

struct TimeSpec {
  std::string name = "coordinate";
  std::map<std::string, double> params;

  friend bool operator==(const TimeSpec&, const TimeSpec&) = default;
};

struct GridSpec {
  std::optional<Coords> lo;
  std::optional<Coords> hi;
  double h = 0.05;
  int stencil_radius = 2;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct PairQuery {
  Coords p;
  Coords q;

  friend bool operator==(const PairQuery&, const PairQuery&) = default;
};

struct BallQuery {
  Coords center;
  double radius = 1.0;
  int n_dirs = 16;

  friend bool operator==(const BallQuery&, const BallQuery&) = default;
};

struct ChartQuery {
  Coords center;
  std::string sense = "future";
  double eps = 1.0;

  friend bool operator==(const ChartQuery&, const ChartQuery&) = default;
};

/// Parsed scene file, schema 1.
struct Scene {
  int schema = 1;
  int dim = 0;
  SpacetimeSpec spacetime;
  TimeSpec time;
  GridSpec grid;
  std::vector<PairQuery> pairs;
  std::vector<BallQuery> balls;
  std::vector<ChartQuery> charts;
  std::map<std::string, std::string> outputs;

  friend bool operator==(const Scene&, const Scene&) = default;
};

/// Throws SceneParse; syntax errors carry "line L, column C".
Scene parse_scene(const std::string& text);
Scene load_scene(const std::string& path);
std::string emit_scene(const Scene& scene);

Spacetime make_spacetime(const SpacetimeSpec& spec, int dim);
Spacetime make_spacetime(const Scene& scene);
Box scene_box(const Scene& scene);
StencilSpec scene_stencil(const Scene& scene);
Vector to_vector(const Coords& c);
Coords to_coords(const Vector& v);

/// Known names: coordinate, cubed, affine (a, b), cosmological (analytic),
/// cosmological_numeric (longest-path values on the scene grid).
TimeFunction make_time_function(const Scene& scene, const Spacetime& st, int threads = 1);

}  // namespace nulldist

#endif  // NULLDIST_SCENE_HPP
