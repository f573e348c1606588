#ifndef NULLDIST_CAUSAL_GRID_HPP
#define NULLDIST_CAUSAL_GRID_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "nulldist/spacetime.hpp"
#include "nulldist/time_function.hpp"

namespace nulldist {

struct StencilSpec {
  int radius = 2;
  bool include_null_exact = true;
};

using LatticeOffset = std::array<int, kMaxDim>;

/// All nonzero integer offsets with max-norm <= radius.
std::vector<LatticeOffset> stencil_offsets(int dim, const StencilSpec& stencil);

struct GridEdge {
  NodeId other;
  double weight;       // |tau(v) - tau(u)|
  double lorentz_len;  // |g(D, D)|^{1/2} at the midpoint
};

inline constexpr std::size_t kMaxGridNodes = 20'000'000;

/// Lattice discretization of a coordinate box with directed future-causal
/// edges. Immutable after construction; queries own their scratch space.
class CausalGrid {
 public:
  const Spacetime& spacetime() const { return st_; }
  const TimeFunction& time_function() const { return tau_fn_; }
  const Box& box() const { return box_; }
  double h() const { return h_; }
  const StencilSpec& stencil() const { return stencil_; }
  int dim() const { return st_.dim(); }

  std::size_t node_count() const { return tau_.size(); }
  std::size_t edge_count() const { return out_targets_.size(); }

  Vector coords(NodeId n) const;
  double tau(NodeId n) const { return tau_[static_cast<std::size_t>(n)]; }
  const std::vector<double>& tau_values() const { return tau_; }

  std::span<const GridEdge> out_edges(NodeId n) const;
  std::span<const GridEdge> in_edges(NodeId n) const;

  /// Node whose coordinates match x to within 1e-6 h, else kNoNode.
  NodeId find_node(const Vector& x) const;
  /// Nearest lattice site if it carries a node, else kNoNode.
  NodeId nearest_node(const Vector& x) const;
  /// Like find_node but throws NodeNotInGrid.
  NodeId require_node(const Vector& x) const;

  /// Lattice extents and the node at a lattice multi-index (or kNoNode).
  const std::array<std::int64_t, kMaxDim>& extents() const { return extents_; }
  NodeId node_at(const std::array<std::int64_t, kMaxDim>& index) const;
  std::array<std::int64_t, kMaxDim> lattice_index(NodeId n) const;

  /// Largest Euclidean offset length in lattice units: radius * sqrt(dim).
  double stencil_length_bound() const;

  friend CausalGrid build_grid(const Spacetime&, const TimeFunction&, const Box&, double,
                               const StencilSpec&, int);

 private:
  CausalGrid(Spacetime st, TimeFunction tau) : st_(std::move(st)), tau_fn_(std::move(tau)) {}

  Spacetime st_;
  TimeFunction tau_fn_;
  Box box_;
  double h_ = 0.0;
  StencilSpec stencil_;
  std::array<std::int64_t, kMaxDim> extents_{};
  std::vector<NodeId> site_to_node_;
  std::vector<std::int64_t> node_site_;
  std::vector<double> tau_;
  std::vector<std::size_t> out_begin_;
  std::vector<GridEdge> out_targets_;
  std::vector<std::size_t> in_begin_;
  std::vector<GridEdge> in_sources_;
};

/// Discretize `box` with spacing h. Nodes and edge segments closer than
/// h/2 to an excision are dropped.
CausalGrid build_grid(const Spacetime& st, const TimeFunction& tau, const Box& box, double h,
                      const StencilSpec& stencil = {}, int threads = 1);

struct ReachSet {
  NodeId origin = kNoNode;
  std::vector<bool> members;
  TimeSense sense = TimeSense::Future;

  bool contains(NodeId n) const { return members[static_cast<std::size_t>(n)]; }
  std::size_t size() const;
};

/// Causal future (or past) of a node: breadth-first closure over the
/// directed edges.
ReachSet reach(const CausalGrid& grid, NodeId origin, TimeSense sense);

struct NullPath {
  double estimate = 0.0;
  std::vector<NodeId> nodes;
  std::vector<TimeSense> senses;  // per step: Future if it follows an edge forward
};

/// Single-source null distances over the undirected support graph.
/// Unreached nodes hold +inf.
std::vector<double> null_distance_field(const CausalGrid& grid, NodeId source);

/// Dijkstra with weights |dtau|; ties broken by node index.
NullPath shortest_null_path(const CausalGrid& grid, NodeId p, NodeId q);

struct RefineReport {
  std::vector<double> h;
  std::vector<double> estimates;
  bool monotone_nonincreasing = false;
  double extrapolated = 0.0;  // first-order Richardson from the last two
};

/// Null-distance estimate between p and q on successively finer grids of
/// the same box.
RefineReport refine_schedule(const Spacetime& st, const TimeFunction& tau, const Vector& p,
                             const Vector& q, const std::vector<double>& h_list,
                             const Box& box, const StencilSpec& stencil = {});

}  // namespace nulldist

#endif  // NULLDIST_CAUSAL_GRID_HPP
