// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. An optional argument selects criteria, e.g. `acceptance AC3`.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "nulldist/isometry.hpp"
#include "nulldist/null_distance.hpp"
#include "nulldist/optical.hpp"

using namespace nulldist;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Box aligned(const Vector& anchor, const Vector& below, const Vector& above, double h) {
  Box b{anchor, anchor};
  for (int k = 0; k < anchor.size(); ++k) {
    b.lo[k] = anchor[k] - std::ceil(below[k] / h - 1e-9) * h;
    b.hi[k] = anchor[k] + std::ceil(above[k] / h - 1e-9) * h;
  }
  return b;
}

Outcome ac1() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto st = minkowski(2);
  const double h = 0.05;
  const Vector p = vec({0, 0});
  const Vector q = vec({0, 1});
  const auto g = build_grid(st, coordinate_time(st), aligned(p, vec({0.6, 0.3}), vec({0.6, 1.3}), h), h);
  const double est = shortest_null_path(g, g.require_node(p), g.require_node(q)).estimate;
  const double secs = seconds_since(t0);
  return {std::abs(est - 1.0) <= 0.05 && secs < 10.0,
          fmt("estimate=%.12g expected=1 runtime=%.2fs", est, secs)};
}

Outcome ac2() {
  const auto st = minkowski(2);
  const auto tau = cubed_time(st);
  const Vector p = vec({0, -0.5});
  const Vector q = vec({0, 0.5});
  bool exact = true;
  for (int j : {1, 2, 4}) {
    exact = exact &&
            null_length(st, zigzag_witness(st, p, q, j), tau) == 2.0 * j * std::pow(0.5 / j, 3);
  }
  std::vector<double> est;
  for (double h : {0.04, 0.02, 0.01}) {
    const auto g = build_grid(st, tau, aligned(p, vec({0.25, 0}), vec({0.25, 1}), h), h);
    est.push_back(shortest_null_path(g, g.require_node(p), g.require_node(q)).estimate);
  }
  const bool decreasing = est[1] <= est[0] && est[2] <= est[1];
  return {exact && decreasing && est[2] <= 0.05,
          std::string("witnesses_exact=") + (exact ? "1" : "0") +
              fmt(" estimates(h=0.04,0.02,0.01)=%.6g,%.6g,%.6g", est[0], est[1], est[2])};
}

Outcome ac3() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto st = missing_ray(4);
  GridParams params{Box{vec({0.5, -1.5, -1.5, -1.5}), vec({3.5, 1.5, 1.5, 1.5})}, 0.25, {}, 1};
  const auto r = encodes_causality_test(st, coordinate_time(st), vec({1, -1, 0, 0}),
                                        vec({3, 1, 0, 0}), params);
  const double secs = seconds_since(t0);
  const bool verdict = r.verdict == Verdict::MissingCausal;
  const bool within = std::abs(r.estimate - 2.0) <= 0.1;
  return {verdict && within && !r.reachable && secs < 60.0,
          std::string("verdict=") + verdict_name(r.verdict) + " reachable=" +
              (r.reachable ? "1" : "0") +
              fmt(" estimate=%.12g (5%% band [1.9, 2.1]) runtime=%.2fs", r.estimate, secs)};
}

Outcome ac4() {
  const auto st = upper_half_minkowski(3);
  const double h = 0.1;
  const auto g = build_grid(st, coordinate_time(st),
                            Box{vec({h, -0.7, -0.7}), vec({1.5, 0.7, 0.7})}, h);
  std::mt19937 rng(4);
  std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(g.node_count()) - 1);
  int pairs = 0;
  double worst = 0.0;
  while (pairs < 200) {
    const NodeId p = pick(rng);
    const auto fut = reach(g, p, TimeSense::Future);
    std::vector<NodeId> members;
    for (std::size_t n = 0; n < g.node_count(); ++n) {
      if (fut.contains(static_cast<NodeId>(n)) && static_cast<NodeId>(n) != p) {
        members.push_back(static_cast<NodeId>(n));
      }
    }
    if (members.empty()) continue;
    const NodeId q = members[rng() % members.size()];
    const double est = shortest_null_path(g, p, q).estimate;
    worst = std::max(worst, std::abs(est - (g.tau(q) - g.tau(p))));
    ++pairs;
  }
  return {worst <= 1e-12, fmt("pairs=%.0f max|estimate-dtau|=%.3g", pairs, worst)};
}

Outcome ac5() {
  const auto st = minkowski(2);
  const double h = 0.05;
  const Vector c = vec({0, 0});
  const auto pts = ball_boundary_sample(st, coordinate_time(st), c, 1.0, 16,
                                        GridParams{ball_box(c, 1.0, h), h, {}, 1});
  double top = 0.0;
  double side = 0.0;
  for (const auto& bp : pts) {
    if (bp.causal_direction) {
      top = std::max(top, std::abs(std::abs(bp.boundary[0]) - 1.0));
    } else {
      side = std::max(side, std::abs(std::abs(bp.boundary[1]) - 1.0));
    }
  }
  return {top <= 2 * h && side <= 2 * h,
          fmt("rays=16 top_dev=%.3g side_dev=%.3g allowed=%.3g", top, side, 2 * h)};
}

Outcome ac6() {
  const auto st = minkowski(4);
  const Vector p = vec({0, 0, 0, 0});
  const auto chart = build_chart(st, p, TimeSense::Future, 1.0);
  std::mt19937 rng(6);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  double grad_dev = 0.0;
  for (int i = 0; i < 100; ++i) {
    Vector x = vec({u(rng), u(rng), u(rng)});
    x *= (0.05 + 0.3 * std::abs(u(rng))) / x.norm();
    const Vector q = vec({0.4 * u(rng), x[0], x[1], x[2]});
    worst = std::max(worst, std::abs(chart_inverse(chart, q).omega - (q[0] - x.norm())));
    if (i % 10 == 0) {
      grad_dev = std::max(grad_dev, std::abs(grad_norm_omega(chart, q) - std::sqrt(2.0)));
    }
  }
  LipschitzOptions opts;
  opts.n_pairs = 500;
  opts.half_width = 0.4;
  opts.points_per_axis = 9;
  const double lip = lipschitz_estimate(chart, opts).max_ratio;
  return {worst <= 1e-6 && grad_dev <= 1e-3 && lip < 2.0,
          fmt("max_omega_err=%.3g max_grad_dev=%.3g lipschitz=%.6g", worst, grad_dev, lip)};
}

Outcome ac7() {
  const auto st = missing_ray(3);
  const auto tau = coordinate_time(st);
  const auto g = build_grid(st, tau, Box{vec({1, -1, -1}), vec({3, 1, 1})}, 0.125);
  GridDistanceOracle d(g);
  std::mt19937 rng(7);
  std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(g.node_count()) - 1);
  double tele = 0.0;
  double rect = 0.0;
  for (int i = 0; i < 20; ++i) {
    NullPath path;
    path.nodes.push_back(pick(rng));
    for (int s = 0; s < 12; ++s) {
      const bool fwd = rng() % 2 == 0;
      const auto edges = fwd ? g.out_edges(path.nodes.back()) : g.in_edges(path.nodes.back());
      if (edges.empty()) continue;
      path.nodes.push_back(edges[rng() % edges.size()].other);
      path.senses.push_back(fwd ? TimeSense::Future : TimeSense::Past);
    }
    const auto c = curve_from_path(g, path);
    const auto parts = zigzag_decompose(st, c, tau);
    tele = std::max(tele, std::abs(parts.future_len - parts.past_len -
                                   (tau(c.vertices.back()) - tau(c.vertices.front()))));
    rect = std::max(rect, std::abs(rectifiable_length(c, d.oracle(), 6, d.rule()) -
                                   null_length(st, c, tau)));
  }
  return {tele <= 1e-12 && rect <= 1e-12,
          fmt("paths=20 telescoping_err=%.3g rectifiable_err=%.3g", tele, rect)};
}

Outcome ac8() {
  const double h = 0.05;
  const auto st1 = upper_half_minkowski(2);
  const auto st2 = conformal(st1, 2.0);
  const Box box{vec({h, -0.5}), vec({1, 0.5})};
  const auto tau = coordinate_time(st1);
  const auto g1 = build_grid(st1, tau, box, h);
  const auto g2 = build_grid(st2, tau, box, h);
  bool same = g1.node_count() == g2.node_count() && g1.edge_count() == g2.edge_count();
  for (std::size_t u = 0; same && u < g1.node_count(); ++u) {
    const auto a = g1.out_edges(static_cast<NodeId>(u));
    const auto b = g2.out_edges(static_cast<NodeId>(u));
    for (std::size_t k = 0; same && k < a.size(); ++k) {
      same = a[k].other == b[k].other && a[k].weight == b[k].weight;
    }
  }
  const auto rep = check_preserving(identity_map(), g1, g2, 200, 0.0, 8);
  return {same && rep.passes,
          std::string("edges_identical=") + (same ? "1" : "0") +
              fmt(" d_hat_dev=%.3g pairs=%.0f", rep.d_hat_dev, static_cast<double>(rep.pairs))};
}

Outcome ac9() {
  const auto st = minkowski(4);
  const Box region{vec({0, 0, 0, 0}), vec({1, 1, 1, 1})};
  const auto tau = coordinate_time(st);
  const auto two = coarea_volume_compare(st, [](const Vector&) { return 2.0; }, tau, region, 0.1);
  const auto one = coarea_volume_compare(st, [](const Vector&) { return 1.0; }, tau, region, 0.1);
  const bool scaled = std::abs(two.vol_n - 8.0) <= 8e-9 && std::abs(two.vol_nm1 - 4.0) <= 4e-9;
  const bool equal = one.vol_n == one.vol_nm1;
  const double h = 0.05;
  const auto rehearsal = rigidity_rehearsal(2, 2.0, Box{vec({h, -0.5}), vec({1, 0.5})}, h);
  return {scaled && equal && rehearsal.passes,
          fmt("phi=2:(%.12g, %.12g) phi=1 equal=%.0f", two.vol_n, two.vol_nm1, equal) +
              " rehearsal=" + (rehearsal.passes ? "1" : "0")};
}

Outcome ac10() {
  const auto mk4 = minkowski(4);
  const Box cone{vec({0.5, -1, -1, -1}), vec({1.5, 1, 1, 1})};
  const auto g = build_grid(mk4, coordinate_time(mk4), cone, 0.25);
  const double lam_t = check_anti_lipschitz(g, coordinate_time(mk4), cone).lambda_best;
  const auto mk2 = minkowski(2);
  const Box near0{vec({-0.1, -0.1}), vec({0.1, 0.1})};
  const auto g3 = build_grid(mk2, cubed_time(mk2), near0, 0.01);
  const double lam_t3 = check_anti_lipschitz(g3, cubed_time(mk2), near0).lambda_best;
  return {lam_t >= 0.6 && lam_t3 <= 0.05,
          fmt("lambda(t)=%.6g lambda(t^3)=%.3g", lam_t, lam_t3)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4}, {"AC5", ac5},
      {"AC6", ac6}, {"AC7", ac7}, {"AC8", ac8}, {"AC9", ac9}, {"AC10", ac10}};
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    if (argc > 1) {
      bool wanted = false;
      for (int i = 1; i < argc; ++i) wanted = wanted || name == argv[i];
      if (!wanted) continue;
    }
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    std::printf("%-5s %s  %s\n", name.c_str(), o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
