#include "nulldist/causal_grid.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <queue>
#include <thread>
#include <utility>

namespace nulldist {

std::vector<LatticeOffset> stencil_offsets(int dim, const StencilSpec& stencil) {
  if (stencil.radius < 1) throw Error(Errc::InvalidArgument, "stencil radius must be >= 1");
  std::vector<LatticeOffset> out;
  LatticeOffset o{};
  for (int k = 0; k < dim; ++k) o[k] = -stencil.radius;
  while (true) {
    bool zero = true;
    for (int k = 0; k < dim; ++k) zero = zero && o[k] == 0;
    if (!zero) out.push_back(o);
    int k = dim - 1;
    while (k >= 0 && o[k] == stencil.radius) {
      o[k] = -stencil.radius;
      --k;
    }
    if (k < 0) break;
    ++o[k];
  }
  return out;
}

Vector CausalGrid::coords(NodeId n) const {
  const auto idx = lattice_index(n);
  Vector x(dim());
  for (int k = 0; k < dim(); ++k) x[k] = box_.lo[k] + static_cast<double>(idx[k]) * h_;
  return x;
}

std::span<const GridEdge> CausalGrid::out_edges(NodeId n) const {
  const auto i = static_cast<std::size_t>(n);
  return {out_targets_.data() + out_begin_[i], out_begin_[i + 1] - out_begin_[i]};
}

std::span<const GridEdge> CausalGrid::in_edges(NodeId n) const {
  const auto i = static_cast<std::size_t>(n);
  return {in_sources_.data() + in_begin_[i], in_begin_[i + 1] - in_begin_[i]};
}

std::array<std::int64_t, kMaxDim> CausalGrid::lattice_index(NodeId n) const {
  std::array<std::int64_t, kMaxDim> idx{};
  std::int64_t site = node_site_[static_cast<std::size_t>(n)];
  for (int k = dim() - 1; k >= 0; --k) {
    idx[k] = site % extents_[k];
    site /= extents_[k];
  }
  return idx;
}

NodeId CausalGrid::node_at(const std::array<std::int64_t, kMaxDim>& index) const {
  std::int64_t site = 0;
  for (int k = 0; k < dim(); ++k) {
    if (index[k] < 0 || index[k] >= extents_[k]) return kNoNode;
    site = site * extents_[k] + index[k];
  }
  return site_to_node_[static_cast<std::size_t>(site)];
}

NodeId CausalGrid::nearest_node(const Vector& x) const {
  if (x.size() != dim()) return kNoNode;
  std::array<std::int64_t, kMaxDim> idx{};
  for (int k = 0; k < dim(); ++k) {
    idx[k] = static_cast<std::int64_t>(std::llround((x[k] - box_.lo[k]) / h_));
  }
  return node_at(idx);
}

NodeId CausalGrid::find_node(const Vector& x) const {
  const NodeId n = nearest_node(x);
  if (n == kNoNode) return kNoNode;
  if ((coords(n) - x).cwiseAbs().maxCoeff() > 1e-6 * h_) return kNoNode;
  return n;
}

NodeId CausalGrid::require_node(const Vector& x) const {
  const NodeId n = find_node(x);
  if (n == kNoNode) {
    throw Error(Errc::NodeNotInGrid, "event is not a grid node (excised, off-lattice or "
                                     "outside the box)");
  }
  return n;
}

double CausalGrid::stencil_length_bound() const {
  return stencil_.radius * std::sqrt(static_cast<double>(dim()));
}

CausalGrid build_grid(const Spacetime& st, const TimeFunction& tau, const Box& box, double h,
                      const StencilSpec& stencil, int threads) {
  const int dim = st.dim();
  if (!(h > 0.0)) throw Error(Errc::InvalidArgument, "grid spacing must be positive");
  if (box.dim() != dim || box.hi.size() != dim) {
    throw Error(Errc::InvalidArgument, "box dimension does not match spacetime");
  }
  CausalGrid grid(st, tau);
  grid.box_ = box;
  grid.h_ = h;
  grid.stencil_ = stencil;

  double sites = 1.0;
  std::int64_t total = 1;
  for (int k = 0; k < dim; ++k) {
    const double span = box.hi[k] - box.lo[k];
    if (span < 0.0) throw Error(Errc::EmptyGrid, "box has negative extent");
    grid.extents_[k] = static_cast<std::int64_t>(std::floor(span / h + 1e-9)) + 1;
    sites *= static_cast<double>(grid.extents_[k]);
    total *= grid.extents_[k];
  }
  if (sites > static_cast<double>(kMaxGridNodes)) {
    throw Error(Errc::GridTooLarge, "lattice would have " + std::to_string(sites) +
                                        " sites (limit 2e7); increase h or shrink the box");
  }

  // Nodes.
  grid.site_to_node_.assign(static_cast<std::size_t>(total), kNoNode);
  const double clearance = 0.5 * h;
  std::size_t in_region = 0;
  std::array<std::int64_t, kMaxDim> idx{};
  Vector x(dim);
  for (std::int64_t site = 0; site < total; ++site) {
    std::int64_t rem = site;
    for (int k = dim - 1; k >= 0; --k) {
      idx[k] = rem % grid.extents_[k];
      rem /= grid.extents_[k];
      x[k] = box.lo[k] + static_cast<double>(idx[k]) * h;
    }
    if (!st.in_region(x)) continue;
    ++in_region;
    if (st.excision_distance(x) < clearance) continue;
    grid.site_to_node_[static_cast<std::size_t>(site)] =
        static_cast<NodeId>(grid.node_site_.size());
    grid.node_site_.push_back(site);
    grid.tau_.push_back(tau(x));
  }
  if (in_region == 0) throw Error(Errc::EmptyGrid, "no lattice site lies in the domain");
  if (grid.node_site_.empty()) {
    throw Error(Errc::ExcisionSwallowsBox, "every lattice site is within h/2 of an excision");
  }

  // Candidate offsets: those that could be future causal somewhere are
  // decided per edge at the midpoint, so keep the whole stencil.
  const auto offsets = stencil_offsets(dim, stencil);
  std::vector<std::int64_t> site_delta(offsets.size());
  for (std::size_t o = 0; o < offsets.size(); ++o) {
    std::int64_t d = 0;
    for (int k = 0; k < dim; ++k) d = d * grid.extents_[k] + offsets[o][k];
    site_delta[o] = d;
  }

  const auto n_nodes = grid.node_site_.size();
  auto edges_of = [&](std::size_t u, std::vector<GridEdge>& out) {
    const auto ui = grid.lattice_index(static_cast<NodeId>(u));
    const Vector xu = grid.coords(static_cast<NodeId>(u));
    Vector delta(dim);
    for (std::size_t o = 0; o < offsets.size(); ++o) {
      bool inside = true;
      for (int k = 0; k < dim && inside; ++k) {
        const std::int64_t j = ui[k] + offsets[o][k];
        inside = j >= 0 && j < grid.extents_[k];
      }
      if (!inside) continue;
      const auto site = grid.node_site_[u] + site_delta[o];
      const NodeId v = grid.site_to_node_[static_cast<std::size_t>(site)];
      if (v == kNoNode) continue;
      for (int k = 0; k < dim; ++k) delta[k] = offsets[o][k] * h;
      const Vector mid = xu + 0.5 * delta;
      if (!st.in_region(mid)) continue;
      const Matrix g = st.metric_unchecked(mid);
      const auto cc = causal_character(g, st.orientation(mid), delta);
      if (!cc.future_causal()) continue;
      if (cc.kind == CausalKind::Null && !stencil.include_null_exact) continue;
      if (!st.excisions().empty() &&
          st.excision_segment_distance(xu, xu + delta) < clearance) {
        continue;
      }
      const double w = std::abs(grid.tau_[static_cast<std::size_t>(v)] - grid.tau_[u]);
      out.push_back({v, w, lorentz_norm(g, delta)});
    }
  };

  // Edges are a pure function of the node; blocks of nodes are processed
  // independently and concatenated in node order.
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(n_nodes)));
  std::vector<std::vector<GridEdge>> block_edges(static_cast<std::size_t>(workers));
  std::vector<std::vector<std::size_t>> block_counts(static_cast<std::size_t>(workers));
  auto run_block = [&](int b) {
    const std::size_t lo = n_nodes * static_cast<std::size_t>(b) / workers;
    const std::size_t hi = n_nodes * static_cast<std::size_t>(b + 1) / workers;
    auto& edges = block_edges[static_cast<std::size_t>(b)];
    auto& counts = block_counts[static_cast<std::size_t>(b)];
    for (std::size_t u = lo; u < hi; ++u) {
      const std::size_t before = edges.size();
      edges_of(u, edges);
      counts.push_back(edges.size() - before);
    }
  };
  if (workers == 1) {
    run_block(0);
  } else {
    std::vector<std::thread> pool;
    for (int b = 0; b < workers; ++b) pool.emplace_back(run_block, b);
    for (auto& t : pool) t.join();
  }

  grid.out_begin_.assign(n_nodes + 1, 0);
  std::size_t u = 0;
  for (int b = 0; b < workers; ++b) {
    for (std::size_t c : block_counts[static_cast<std::size_t>(b)]) {
      grid.out_begin_[u + 1] = grid.out_begin_[u] + c;
      ++u;
    }
    auto& e = block_edges[static_cast<std::size_t>(b)];
    grid.out_targets_.insert(grid.out_targets_.end(), e.begin(), e.end());
    std::vector<GridEdge>().swap(e);
  }

  // Reverse adjacency, sources in increasing node order.
  grid.in_begin_.assign(n_nodes + 1, 0);
  for (const auto& e : grid.out_targets_) ++grid.in_begin_[static_cast<std::size_t>(e.other) + 1];
  for (std::size_t i = 0; i < n_nodes; ++i) grid.in_begin_[i + 1] += grid.in_begin_[i];
  grid.in_sources_.resize(grid.out_targets_.size());
  std::vector<std::size_t> fill(grid.in_begin_.begin(), grid.in_begin_.end() - 1);
  for (std::size_t s = 0; s < n_nodes; ++s) {
    for (std::size_t e = grid.out_begin_[s]; e < grid.out_begin_[s + 1]; ++e) {
      const auto& edge = grid.out_targets_[e];
      grid.in_sources_[fill[static_cast<std::size_t>(edge.other)]++] = {
          static_cast<NodeId>(s), edge.weight, edge.lorentz_len};
    }
  }
  return grid;
}

std::size_t ReachSet::size() const {
  return static_cast<std::size_t>(std::count(members.begin(), members.end(), true));
}

ReachSet reach(const CausalGrid& grid, NodeId origin, TimeSense sense) {
  if (origin < 0 || static_cast<std::size_t>(origin) >= grid.node_count()) {
    throw Error(Errc::NodeNotInGrid, "reach origin is not a grid node");
  }
  if (sense == TimeSense::None) throw Error(Errc::InvalidArgument, "reach needs a time sense");
  ReachSet out;
  out.origin = origin;
  out.sense = sense;
  out.members.assign(grid.node_count(), false);
  std::deque<NodeId> queue{origin};
  out.members[static_cast<std::size_t>(origin)] = true;
  while (!queue.empty()) {
    const NodeId u = queue.front();
    queue.pop_front();
    const auto edges = sense == TimeSense::Future ? grid.out_edges(u) : grid.in_edges(u);
    for (const auto& e : edges) {
      if (!out.members[static_cast<std::size_t>(e.other)]) {
        out.members[static_cast<std::size_t>(e.other)] = true;
        queue.push_back(e.other);
      }
    }
  }
  return out;
}

namespace {

struct DijkstraState {
  std::vector<double> dist;
  std::vector<NodeId> pred;
  std::vector<TimeSense> pred_sense;
};

// Stops early once `target` is settled (kNoNode: settle everything).
DijkstraState dijkstra(const CausalGrid& grid, NodeId source, NodeId target) {
  const auto n = grid.node_count();
  DijkstraState s;
  s.dist.assign(n, std::numeric_limits<double>::infinity());
  s.pred.assign(n, kNoNode);
  s.pred_sense.assign(n, TimeSense::None);
  using Item = std::pair<double, NodeId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  std::vector<bool> settled(n, false);
  s.dist[static_cast<std::size_t>(source)] = 0.0;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (settled[static_cast<std::size_t>(u)]) continue;
    settled[static_cast<std::size_t>(u)] = true;
    if (u == target) break;
    auto relax = [&](const GridEdge& e, TimeSense sense) {
      const auto v = static_cast<std::size_t>(e.other);
      const double nd = d + e.weight;
      if (nd < s.dist[v]) {
        s.dist[v] = nd;
        s.pred[v] = u;
        s.pred_sense[v] = sense;
        heap.emplace(nd, e.other);
      }
    };
    for (const auto& e : grid.out_edges(u)) relax(e, TimeSense::Future);
    for (const auto& e : grid.in_edges(u)) relax(e, TimeSense::Past);
  }
  return s;
}

void check_node(const CausalGrid& grid, NodeId n) {
  if (n < 0 || static_cast<std::size_t>(n) >= grid.node_count()) {
    throw Error(Errc::NodeNotInGrid, "node id out of range");
  }
}

}  // namespace

std::vector<double> null_distance_field(const CausalGrid& grid, NodeId source) {
  check_node(grid, source);
  return dijkstra(grid, source, kNoNode).dist;
}

NullPath shortest_null_path(const CausalGrid& grid, NodeId p, NodeId q) {
  check_node(grid, p);
  check_node(grid, q);
  const auto s = dijkstra(grid, p, q);
  const double d = s.dist[static_cast<std::size_t>(q)];
  if (!std::isfinite(d)) {
    throw Error(Errc::Disconnected, "no piecewise causal grid path joins the nodes");
  }
  NullPath path;
  path.estimate = d;
  for (NodeId v = q; v != kNoNode; v = s.pred[static_cast<std::size_t>(v)]) {
    path.nodes.push_back(v);
    if (v != p) path.senses.push_back(s.pred_sense[static_cast<std::size_t>(v)]);
  }
  std::reverse(path.nodes.begin(), path.nodes.end());
  std::reverse(path.senses.begin(), path.senses.end());
  return path;
}

RefineReport refine_schedule(const Spacetime& st, const TimeFunction& tau, const Vector& p,
                             const Vector& q, const std::vector<double>& h_list,
                             const Box& box, const StencilSpec& stencil) {
  if (h_list.empty()) throw Error(Errc::InvalidArgument, "empty refinement schedule");
  for (std::size_t i = 1; i < h_list.size(); ++i) {
    if (!(h_list[i] < h_list[i - 1])) {
      throw Error(Errc::InvalidArgument, "refinement schedule must be decreasing");
    }
  }
  RefineReport report;
  for (double h : h_list) {
    const auto grid = build_grid(st, tau, box, h, stencil);
    const auto path =
        shortest_null_path(grid, grid.require_node(p), grid.require_node(q));
    report.h.push_back(h);
    report.estimates.push_back(path.estimate);
  }
  report.monotone_nonincreasing = true;
  for (std::size_t i = 1; i < report.estimates.size(); ++i) {
    if (report.estimates[i] > report.estimates[i - 1] + 1e-12) {
      report.monotone_nonincreasing = false;
    }
  }
  const auto n = report.estimates.size();
  if (n >= 2) {
    const double h1 = report.h[n - 2];
    const double h2 = report.h[n - 1];
    const double e1 = report.estimates[n - 2];
    const double e2 = report.estimates[n - 1];
    report.extrapolated = (h1 * e2 - h2 * e1) / (h1 - h2);
  } else {
    report.extrapolated = report.estimates.back();
  }
  return report;
}

}  // namespace nulldist
