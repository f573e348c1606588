#include "nulldist/cli.hpp"

#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "nulldist/isometry.hpp"
#include "nulldist/null_distance.hpp"
#include "nulldist/optical.hpp"
#include "nulldist/scene.hpp"

namespace nulldist::cli {

using nlohmann::json;

double r12(double x) {
  if (!std::isfinite(x)) return x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

std::string fmt12(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

namespace {

json num(double x) {
  if (!std::isfinite(x)) return nullptr;
  return r12(x);
}

json coords_json(const Vector& v) {
  json a = json::array();
  for (int k = 0; k < v.size(); ++k) a.push_back(num(v[k]));
  return a;
}

Vector parse_point(const std::string& text, int dim) {
  std::vector<double> c;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      c.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(Errc::SceneParse, "bad coordinate '" + item + "' in '" + text + "'");
    }
  }
  if (static_cast<int>(c.size()) != dim) {
    throw Error(Errc::SceneParse, "point '" + text + "' needs " + std::to_string(dim) +
                                      " coordinates");
  }
  return to_vector(c);
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::SceneParse, "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw Error(Errc::SceneParse, path + ": " + e.what());
  }
}

Vector json_point(const json& j, int dim, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim) {
    throw Error(Errc::SceneParse, where + ": expected " + std::to_string(dim) + " coordinates");
  }
  Vector v(dim);
  for (int k = 0; k < dim; ++k) {
    if (!j[static_cast<std::size_t>(k)].is_number()) {
      throw Error(Errc::SceneParse, where + ": expected numbers");
    }
    v[k] = j[static_cast<std::size_t>(k)].get<double>();
  }
  return v;
}

// Box around the points padded by half their spread plus one cell, aligned
// so the first point is a lattice site.
Box auto_box(const std::vector<Vector>& points, double h) {
  const Vector& anchor = points.front();
  Vector lo = anchor;
  Vector hi = anchor;
  for (const auto& p : points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double pad = 0.5 * (hi - lo).maxCoeff() + h;
  Box box{anchor, anchor};
  for (int k = 0; k < anchor.size(); ++k) {
    box.lo[k] = anchor[k] - std::ceil((anchor[k] - lo[k] + pad) / h - 1e-9) * h;
    box.hi[k] = anchor[k] + std::ceil((hi[k] - anchor[k] + pad) / h - 1e-9) * h;
  }
  return box;
}

struct Common {
  std::string scene;
  double h = 0.0;
  int radius = 0;
  int threads = 1;
  unsigned seed = 42;
};

struct Setup {
  Scene scene;
  Spacetime st;
  TimeFunction tau;
  double h;
  StencilSpec stencil;
};

Setup load(const Common& c) {
  Scene scene = load_scene(c.scene);
  if (c.h > 0.0) scene.grid.h = c.h;
  if (c.radius > 0) scene.grid.stencil_radius = c.radius;
  Spacetime st = make_spacetime(scene);
  TimeFunction tau = make_time_function(scene, st, c.threads);
  const double h = scene.grid.h;
  const StencilSpec stencil = scene_stencil(scene);
  return Setup{std::move(scene), std::move(st), std::move(tau), h, stencil};
}

Box box_for(const Setup& s, const std::vector<Vector>& points) {
  return s.scene.grid.lo ? scene_box(s.scene) : auto_box(points, s.h);
}

void emit(std::ostream& out, const json& j) { out << j.dump(2) << "\n"; }

void add_common(CLI::App* sub, Common& c, bool with_seed) {
  sub->set_help_flag("--help", "Print this help message and exit");
  sub->add_option("scene", c.scene, "Scene JSON file")->required();
  sub->add_option("--h", c.h, "Lattice spacing (overrides the scene)");
  sub->add_option("--stencil-radius", c.radius, "Stencil radius (overrides the scene)");
  sub->add_option("--threads", c.threads, "Worker thread cap")->check(CLI::PositiveNumber);
  if (with_seed) sub->add_option("--seed", c.seed, "Sampling seed");
}

std::string preset_help() {
  std::string s = "Presets run by paper-suite:\n";
  s += "  cubed-time      tau = t^3: zigzag witnesses and a vanishing grid estimate\n";
  s += "  missing-ray     null-distance equality without causal reachability\n";
  s += "  spacelike-pair  Minkowski pair at unit spatial separation\n";
  s += "  conformal       null distance unchanged under g -> 4g\n";
  s += "  ball-cylinder   null-distance ball of radius 1 in 1+1 Minkowski\n";
  return s;
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Null distance toolkit for Lorentzian spacetimes"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.footer(preset_help());
  app.require_subcommand(1);

  Common c;
  std::string p_text, q_text, path_csv, out_path, center_text, sense = "future", queries_path,
                                                                 pairs_path;
  double radius = 1.0;
  double eps = 1.0;
  int n_dirs = 16;
  int n_sources = 64;
  int n_pairs = 200;
  double tol = 1e-9;
  bool vertical = false;
  std::string scene2, map_spec = "identity", map_table;
  double suite_h = 0.05;

  auto* nd = app.add_subcommand("nulldist", "Null distance between two events");
  add_common(nd, c, false);
  nd->add_option("--p", p_text, "First event, comma separated")->required();
  nd->add_option("--q", q_text, "Second event, comma separated")->required();
  nd->add_option("--path-csv", path_csv, "Write the minimizing lattice path as CSV");

  auto* causal = app.add_subcommand("causal", "Grid causal reachability q in J+(p)");
  add_common(causal, c, false);
  causal->add_option("--p", p_text)->required();
  causal->add_option("--q", q_text)->required();

  auto* cosmo = app.add_subcommand("cosmo-time", "Numeric cosmological time per node (CSV)");
  add_common(cosmo, c, false);
  cosmo->add_option("--out", out_path, "CSV output path (default stdout)");

  auto* antilip = app.add_subcommand("check-antilip", "Anti-Lipschitz constant on the grid box");
  add_common(antilip, c, true);
  antilip->add_option("--sources", n_sources, "Sampled reach-set sources");
  antilip->add_flag("--vertical", vertical, "Only pairs on a common time line");

  auto* optical = app.add_subcommand("optical", "Optical function at query points (CSV)");
  add_common(optical, c, false);
  optical->add_option("--center", center_text, "Chart base event")->required();
  optical->add_option("--sense", sense, "future or past")
      ->check(CLI::IsMember({"future", "past"}));
  optical->add_option("--eps", eps, "Chart half-extent");
  optical->add_option("--queries", queries_path, "JSON list of query points")->required();

  auto* ball = app.add_subcommand("ball", "Null-distance ball boundary along rays (CSV)");
  add_common(ball, c, false);
  ball->add_option("--center", center_text, "Ball center")->required();
  ball->add_option("--radius", radius, "Ball radius");
  ball->add_option("--dirs", n_dirs, "Number of rays in the (x0, x1) plane");

  auto* encode = app.add_subcommand("encode-test", "Causality-encoding verdicts for a pair file");
  add_common(encode, c, false);
  encode->add_option("--pairs", pairs_path, "JSON list of [p, q] coordinate pairs")->required();

  auto* iso = app.add_subcommand("isometry", "Rigidity checks for a map between two scenes");
  add_common(iso, c, true);
  iso->add_option("target", scene2, "Target scene JSON")->required();
  iso->add_option("--map", map_spec, "identity | translation:a,b,.. | dilation:c | rotation:i,j,angle");
  iso->add_option("--map-table", map_table, "CSV rows: source coords..., target coords...");
  iso->add_option("--pairs", n_pairs, "Sampled node pairs");
  iso->add_option("--tol", tol, "Deviation tolerance");

  auto* suite = app.add_subcommand("paper-suite", "Run every preset and print a pass/fail table");
  suite->set_help_flag("--help", "Print this help message and exit");
  suite->add_option("--h", suite_h, "Lattice spacing");
  suite->add_option("--threads", c.threads, "Worker thread cap")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (suite->parsed()) {
      const auto results = run_paper_suite(suite_h, c.threads);
      bool all = true;
      out << "preset          result  detail\n";
      for (const auto& r : results) {
        char line[32];
        std::snprintf(line, sizeof line, "%-14s  %-6s", r.name.c_str(), r.passed ? "PASS" : "FAIL");
        out << line << "  " << r.detail << "\n";
        all = all && r.passed;
      }
      return all ? 0 : 1;
    }

    const Setup s = load(c);
    const int dim = s.scene.dim;

    if (nd->parsed() || causal->parsed()) {
      const Vector p = parse_point(p_text, dim);
      const Vector q = parse_point(q_text, dim);
      const auto t0 = std::chrono::steady_clock::now();
      const auto grid = build_grid(s.st, s.tau, box_for(s, {p, q}), s.h, s.stencil, c.threads);
      const NodeId np = grid.require_node(p);
      const NodeId nq = grid.require_node(q);
      if (causal->parsed()) {
        emit(out, {{"reachable", reach(grid, np, TimeSense::Future).contains(nq)}});
        return 0;
      }
      const auto path = shortest_null_path(grid, np, nq);
      const double ms = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
      emit(out, {{"estimate", num(path.estimate)},
                 {"lower_bound", num(std::abs(grid.tau(nq) - grid.tau(np)))},
                 {"path_len", path.nodes.size() - 1},
                 {"wall_ms", num(ms)}});
      if (!path_csv.empty()) {
        std::ofstream csv(path_csv);
        for (int k = 0; k < dim; ++k) csv << "x" << k << ",";
        csv << "tau\n";
        for (NodeId n : path.nodes) {
          const Vector x = grid.coords(n);
          for (int k = 0; k < dim; ++k) csv << fmt12(x[k]) << ",";
          csv << fmt12(grid.tau(n)) << "\n";
        }
      }
      return 0;
    }

    if (cosmo->parsed()) {
      const auto grid = build_grid(s.st, s.tau, scene_box(s.scene), s.h, s.stencil, c.threads);
      const auto tau = cosmological_time_numeric(grid);
      std::ofstream file;
      if (!out_path.empty()) file.open(out_path);
      std::ostream& csv = out_path.empty() ? out : file;
      for (int k = 0; k < dim; ++k) csv << "x" << k << ",";
      csv << "tau_numeric,tau_analytic_if_known,abs_err\n";
      const bool known = s.st.has_analytic_cosmological_time();
      for (std::size_t n = 0; n < grid.node_count(); ++n) {
        const Vector x = grid.coords(static_cast<NodeId>(n));
        for (int k = 0; k < dim; ++k) csv << fmt12(x[k]) << ",";
        csv << fmt12(tau[n]) << ",";
        if (known) {
          const double exact = s.st.analytic_cosmological_time()(x);
          csv << fmt12(exact) << "," << fmt12(std::abs(tau[n] - exact));
        } else {
          csv << ",";
        }
        csv << "\n";
      }
      return 0;
    }

    if (antilip->parsed()) {
      const Box box = scene_box(s.scene);
      const auto grid = build_grid(s.st, s.tau, box, s.h, s.stencil, c.threads);
      AntiLipschitzOptions opts;
      opts.n_sources = n_sources;
      opts.seed = c.seed;
      opts.vertical_only = vertical;
      const auto rep = check_anti_lipschitz(grid, s.tau, box, opts);
      emit(out, {{"lambda_best", num(rep.lambda_best)},
                 {"violations", rep.violations.size()},
                 {"pairs_tested", rep.pairs_tested},
                 {"argmin", {coords_json(grid.coords(rep.argmin_earlier)),
                             coords_json(grid.coords(rep.argmin_later))}},
                 {"seed", c.seed}});
      return 0;
    }

    if (optical->parsed()) {
      const Vector center = parse_point(center_text, dim);
      const auto chart = build_chart(s.st, center,
                                     sense == "future" ? TimeSense::Future : TimeSense::Past, eps);
      const json qs = read_json_file(queries_path);
      if (!qs.is_array()) throw Error(Errc::SceneParse, queries_path + ": expected a list");
      for (int k = 0; k < dim; ++k) out << "x" << k << ",";
      out << "omega,lambda,grad_norm\n";
      for (std::size_t i = 0; i < qs.size(); ++i) {
        const Vector q = json_point(qs[i], dim, queries_path + "[" + std::to_string(i) + "]");
        const auto v = chart_inverse(chart, q);
        for (int k = 0; k < dim; ++k) out << fmt12(q[k]) << ",";
        out << fmt12(v.omega) << "," << fmt12(v.lambda) << ",";
        if (!v.on_axis) out << fmt12(grad_norm_omega(chart, q));
        out << "\n";
      }
      return 0;
    }

    if (ball->parsed()) {
      const Vector center = parse_point(center_text, dim);
      GridParams params{s.scene.grid.lo ? scene_box(s.scene) : ball_box(center, radius, s.h), s.h,
                        s.stencil, c.threads};
      const auto pts = ball_boundary_sample(s.st, s.tau, center, radius, n_dirs, params);
      for (int k = 0; k < dim; ++k) out << "d" << k << ",";
      for (int k = 0; k < dim; ++k) out << "x" << k << (k + 1 < dim ? "," : "\n");
      for (const auto& bp : pts) {
        for (int k = 0; k < dim; ++k) out << fmt12(bp.direction[k]) << ",";
        for (int k = 0; k < dim; ++k) out << fmt12(bp.boundary[k]) << (k + 1 < dim ? "," : "\n");
      }
      return 0;
    }

    if (encode->parsed()) {
      const json list = read_json_file(pairs_path);
      if (!list.is_array()) throw Error(Errc::SceneParse, pairs_path + ": expected a list");
      std::vector<std::pair<Vector, Vector>> pairs;
      std::vector<Vector> all;
      for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string where = pairs_path + "[" + std::to_string(i) + "]";
        if (!list[i].is_array() || list[i].size() != 2) {
          throw Error(Errc::SceneParse, where + ": expected [p, q]");
        }
        pairs.emplace_back(json_point(list[i][0], dim, where), json_point(list[i][1], dim, where));
        all.push_back(pairs.back().first);
        all.push_back(pairs.back().second);
      }
      if (pairs.empty()) throw Error(Errc::SceneParse, pairs_path + ": no pairs");
      const auto grid = build_grid(s.st, s.tau, box_for(s, all), s.h, s.stencil, c.threads);
      json results = json::array();
      for (const auto& [p, q] : pairs) {
        const auto r = encodes_causality_test(grid, grid.require_node(p), grid.require_node(q));
        results.push_back({{"p", coords_json(p)},
                           {"q", coords_json(q)},
                           {"verdict", verdict_name(r.verdict)},
                           {"estimate", num(r.estimate)},
                           {"lower_bound", num(r.lower_bound)},
                           {"tol_eq", num(r.tol_eq)},
                           {"reachable", r.reachable},
                           {"properness_unverified", r.properness_unverified}});
      }
      emit(out, {{"results", results}});
      return 0;
    }

    if (iso->parsed()) {
      Common c2 = c;
      c2.scene = scene2;
      const Setup t = load(c2);
      if (t.scene.dim != dim) throw Error(Errc::SceneParse, "scenes differ in dimension");
      PointMap map = identity_map();
      if (!map_table.empty()) {
        std::ifstream in(map_table);
        if (!in) throw Error(Errc::SceneParse, "cannot open " + map_table);
        std::vector<std::pair<Vector, Vector>> rows;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
          ++lineno;
          if (line.empty() || !(std::isdigit(line[0]) || line[0] == '-' || line[0] == '.')) continue;
          std::vector<double> v;
          std::stringstream ls(line);
          std::string cell;
          while (std::getline(ls, cell, ',')) v.push_back(std::stod(cell));
          if (static_cast<int>(v.size()) != 2 * dim) {
            throw Error(Errc::SceneParse, map_table + ": line " + std::to_string(lineno) +
                                              " needs " + std::to_string(2 * dim) + " values");
          }
          rows.emplace_back(to_vector({v.begin(), v.begin() + dim}),
                            to_vector({v.begin() + dim, v.end()}));
        }
        map = PointMap::table("table", std::move(rows));
      } else {
        const auto colon = map_spec.find(':');
        std::vector<double> args;
        if (colon != std::string::npos) {
          std::stringstream as(map_spec.substr(colon + 1));
          std::string a;
          while (std::getline(as, a, ',')) args.push_back(std::stod(a));
        }
        map = named_map(map_spec.substr(0, colon), args, dim);
      }
      const Box box1 = scene_box(s.scene);
      const auto grid1 = build_grid(s.st, s.tau, box1, s.h, s.stencil, c.threads);
      const auto grid2 = build_grid(t.st, t.tau, scene_box(t.scene), t.h, t.stencil, c.threads);
      const auto pres = check_preserving(map, grid1, grid2, n_pairs, tol, c.seed);
      json report = {{"d_hat_dev", num(pres.d_hat_dev)},
                     {"tau_dev", num(pres.tau_dev)},
                     {"preserving", pres.passes},
                     {"pairs", pres.pairs},
                     {"seed", c.seed},
                     {"phi_mean", nullptr},
                     {"vol_n", nullptr},
                     {"vol_nm1", nullptr},
                     {"verdict", nullptr}};
      if (map.is_closed_form()) {
        bool conformal_everywhere = true;
        auto phi = [&](const Vector& x) {
          const auto f = conformal_factor(map, s.st, t.st, x);
          conformal_everywhere = conformal_everywhere && f.conformal;
          return f.phi;
        };
        const auto rep = coarea_volume_compare(s.st, phi, s.tau, box1, s.h);
        double mean = 0.0;
        for (const auto& sample : rep.phi_samples) mean += sample.phi;
        mean /= static_cast<double>(std::max<std::size_t>(1, rep.phi_samples.size()));
        report["phi_mean"] = num(mean);
        report["vol_n"] = num(rep.vol_n);
        report["vol_nm1"] = num(rep.vol_nm1);
        report["verdict"] = conformal_everywhere ? conformal_verdict_name(rep.verdict)
                                                 : "NotConformal";
        report["outside_theorem_dimension"] = rep.below_theorem_dimension;
      }
      emit(out, report);
      return 0;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == Errc::SceneParse ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace nulldist::cli
