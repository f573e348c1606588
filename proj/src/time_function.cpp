#include "nulldist/time_function.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>

#include "nulldist/causal_grid.hpp"

namespace nulldist {

namespace {

bool has_t_positive_cosmology(const Spacetime& st) {
  const auto& n = st.name();
  return n == "upper_half_minkowski" || n == "missing_ray" || n == "warped_product";
}

}  // namespace

TimeFunction coordinate_time(const Spacetime& st) {
  TimeFunction tau;
  tau.name = "coordinate";
  tau.eval = [](const Vector& x) { return x[0]; };
  tau.claims.generalized = true;
  tau.claims.anti_lipschitz = true;
  tau.claims.cosmological = has_t_positive_cosmology(st);
  // Level sets of t are noncompact on every built-in; only the half-space
  // is declared proper, matching how the theorem is applied there.
  tau.claims.proper = st.name() == "upper_half_minkowski";
  return tau;
}

TimeFunction cubed_time(const Spacetime&) {
  TimeFunction tau;
  tau.name = "cubed";
  tau.eval = [](const Vector& x) { return x[0] * x[0] * x[0]; };
  tau.claims.generalized = true;
  tau.claims.anti_lipschitz = false;
  return tau;
}

TimeFunction affine_time(const Spacetime&, double a, double b) {
  if (!(a > 0.0)) throw Error(Errc::InvalidArgument, "affine time needs a > 0");
  TimeFunction tau;
  tau.name = "affine";
  tau.eval = [a, b](const Vector& x) { return a * x[0] + b; };
  tau.claims.generalized = true;
  tau.claims.anti_lipschitz = true;
  return tau;
}

TimeFunction analytic_cosmological_time(const Spacetime& st) {
  if (!st.has_analytic_cosmological_time()) {
    throw Error(Errc::InvalidArgument, st.name() + " has no known cosmological time");
  }
  TimeFunction tau;
  tau.name = "cosmological";
  tau.eval = st.analytic_cosmological_time();
  tau.claims = {true, true, st.name() == "upper_half_minkowski", true};
  return tau;
}

TimeFunction time_function_from_nodes(const CausalGrid& grid, std::vector<double> values,
                                      std::string name, TimeClaims claims) {
  if (values.size() != grid.node_count()) {
    throw Error(Errc::InvalidArgument, "one value per grid node required");
  }
  auto shared_values = std::make_shared<const std::vector<double>>(std::move(values));
  const Box box = grid.box();
  const double h = grid.h();
  const int dim = grid.dim();
  // Captured by value so the interpolant does not depend on the grid.
  auto extents = grid.extents();
  auto sites = std::make_shared<std::vector<NodeId>>();
  std::int64_t total = 1;
  for (int k = 0; k < dim; ++k) total *= extents[k];
  sites->assign(static_cast<std::size_t>(total), kNoNode);
  for (std::size_t n = 0; n < grid.node_count(); ++n) {
    const auto idx = grid.lattice_index(static_cast<NodeId>(n));
    std::int64_t site = 0;
    for (int k = 0; k < dim; ++k) site = site * extents[k] + idx[k];
    (*sites)[static_cast<std::size_t>(site)] = static_cast<NodeId>(n);
  }

  TimeFunction tau;
  tau.name = std::move(name);
  tau.claims = claims;
  tau.eval = [shared_values, sites, box, h, dim, extents](const Vector& x) {
    std::array<std::int64_t, kMaxDim> base{};
    std::array<double, kMaxDim> frac{};
    for (int k = 0; k < dim; ++k) {
      const double u = (x[k] - box.lo[k]) / h;
      double f = std::floor(u);
      if (u - f > 1.0 - 1e-9) f += 1.0;  // snap to an exact lattice plane
      base[k] = static_cast<std::int64_t>(f);
      frac[k] = std::max(0.0, u - f);
    }
    double acc = 0.0;
    double weight = 0.0;
    for (int corner = 0; corner < (1 << dim); ++corner) {
      double w = 1.0;
      std::int64_t site = 0;
      bool ok = true;
      for (int k = 0; k < dim && ok; ++k) {
        const int bit = (corner >> k) & 1;
        const double wk = bit ? frac[k] : 1.0 - frac[k];
        if (wk == 0.0) {
          ok = false;
          break;
        }
        w *= wk;
        const std::int64_t j = base[k] + bit;
        if (j < 0 || j >= extents[k]) ok = false;
        site = site * extents[k] + j;
      }
      if (!ok) continue;
      const NodeId n = (*sites)[static_cast<std::size_t>(site)];
      if (n == kNoNode) continue;
      acc += w * (*shared_values)[static_cast<std::size_t>(n)];
      weight += w;
    }
    if (weight == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return acc / weight;
  };
  return tau;
}

namespace {

// Lorentzian length of the segment from x back along the orientation field
// to the past edge of the domain, capped at `cap` units of coordinate time.
double past_boundary_length(const Spacetime& st, const Vector& x, double cap, double h) {
  Vector dir = -st.orientation(x);
  if (!(dir[0] < 0.0)) return 0.0;
  dir /= -dir[0];
  auto inside = [&](double s) { return st.in_domain(x + s * dir); };
  double lo = 0.0;
  double hi = cap;
  const double probe = 0.25 * h;
  bool exited = false;
  for (double s = probe; s <= cap + 1e-15; s += probe) {
    if (!inside(s)) {
      hi = s;
      exited = true;
      break;
    }
    lo = s;
  }
  if (exited) {
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (inside(mid) ? lo : hi) = mid;
    }
  } else {
    lo = cap;
  }
  const int pieces = 32;
  double len = 0.0;
  const double ds = lo / pieces;
  for (int i = 0; i < pieces; ++i) {
    const Vector mid = x + (i + 0.5) * ds * dir;
    len += lorentz_norm(st.metric_unchecked(mid), dir) * ds;
  }
  return len;
}

}  // namespace

std::vector<double> cosmological_time_numeric(const CausalGrid& grid) {
  const auto n = grid.node_count();
  std::vector<std::size_t> indegree(n, 0);
  for (std::size_t u = 0; u < n; ++u) indegree[u] = grid.in_edges(static_cast<NodeId>(u)).size();

  std::vector<double> tau(n, 0.0);
  const double cap = grid.box().hi[0] - grid.box().lo[0];
  std::vector<NodeId> ready;
  for (std::size_t u = 0; u < n; ++u) {
    if (indegree[u] == 0) {
      tau[u] = past_boundary_length(grid.spacetime(), grid.coords(static_cast<NodeId>(u)), cap,
                                    grid.h());
      ready.push_back(static_cast<NodeId>(u));
    }
  }
  // Kahn order; ready is processed as a FIFO in node order.
  std::size_t head = 0;
  std::vector<bool> seeded(n, false);
  while (head < ready.size()) {
    const NodeId u = ready[head++];
    for (const auto& e : grid.out_edges(u)) {
      const auto v = static_cast<std::size_t>(e.other);
      const double cand = tau[static_cast<std::size_t>(u)] + e.lorentz_len;
      if (!seeded[v] || cand > tau[v]) {
        tau[v] = cand;
        seeded[v] = true;
      }
      if (--indegree[v] == 0) ready.push_back(e.other);
    }
  }
  if (ready.size() != n) {
    throw Error(Errc::CyclicGraph, "directed grid edges contain a cycle");
  }
  return tau;
}

AntiLipschitzReport check_anti_lipschitz(const CausalGrid& grid, const TimeFunction& tau,
                                         const Box& region,
                                         const AntiLipschitzOptions& options) {
  AntiLipschitzReport report;
  report.region = region;
  const auto n = grid.node_count();
  const double slack = 1e-9 * grid.h();
  std::vector<bool> in_region(n, false);
  std::vector<NodeId> region_nodes;
  std::vector<double> tau_at(n, 0.0);
  for (std::size_t u = 0; u < n; ++u) {
    const Vector x = grid.coords(static_cast<NodeId>(u));
    if (region.contains(x, slack)) {
      in_region[u] = true;
      region_nodes.push_back(static_cast<NodeId>(u));
      tau_at[u] = tau(x);
    }
  }

  double best = std::numeric_limits<double>::infinity();
  auto test_pair = [&](NodeId a, NodeId b) {
    const Vector xa = grid.coords(a);
    const Vector xb = grid.coords(b);
    if (options.vertical_only) {
      if ((xb.tail(xb.size() - 1) - xa.tail(xa.size() - 1)).cwiseAbs().maxCoeff() > slack) {
        return;
      }
    }
    const double gap = tau_at[static_cast<std::size_t>(b)] - tau_at[static_cast<std::size_t>(a)];
    const double dist = (xb - xa).norm();
    ++report.pairs_tested;
    if (gap <= 0.0) report.violations.push_back({a, b, gap, dist});
    const double ratio = gap / dist;
    if (ratio < best) {
      best = ratio;
      report.argmin_earlier = a;
      report.argmin_later = b;
    }
  };

  for (NodeId u : region_nodes) {
    for (const auto& e : grid.out_edges(u)) {
      if (in_region[static_cast<std::size_t>(e.other)]) test_pair(u, e.other);
    }
  }
  if (!region_nodes.empty() && options.n_sources > 0) {
    std::mt19937 rng(options.seed);
    std::uniform_int_distribution<std::size_t> pick(0, region_nodes.size() - 1);
    for (int s = 0; s < options.n_sources; ++s) {
      const NodeId src = region_nodes[pick(rng)];
      const auto future = reach(grid, src, TimeSense::Future);
      for (NodeId v : region_nodes) {
        if (v != src && future.contains(v)) test_pair(src, v);
      }
    }
  }
  if (report.pairs_tested == 0) {
    throw Error(Errc::NoCausalPairs, "no causally related node pairs inside the region");
  }
  report.lambda_best = std::max(0.0, best);
  if (!report.violations.empty()) report.lambda_best = 0.0;
  return report;
}

RegularityReport check_regularity(const CausalGrid& grid, const TimeFunction& tau) {
  RegularityReport report;
  report.eps_reg = 2.0 * grid.h() * grid.stencil_length_bound();
  report.all_finite = true;
  for (std::size_t u = 0; u < grid.node_count(); ++u) {
    const Vector x = grid.coords(static_cast<NodeId>(u));
    const double value = tau(x);
    if (!std::isfinite(value)) report.all_finite = false;
    if (grid.in_edges(static_cast<NodeId>(u)).empty()) {
      ++report.final_nodes;
      report.max_final_abs_tau = std::max(report.max_final_abs_tau, std::abs(value));
    }
  }
  report.regular = report.all_finite && report.max_final_abs_tau <= report.eps_reg;
  return report;
}

}  // namespace nulldist
