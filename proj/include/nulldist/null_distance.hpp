#ifndef NULLDIST_NULL_DISTANCE_HPP
#define NULLDIST_NULL_DISTANCE_HPP

#include <functional>
#include <memory>
#include <unordered_map>
#include <vector>

#include "nulldist/causal_grid.hpp"
#include "nulldist/spacetime.hpp"
#include "nulldist/time_function.hpp"

namespace nulldist {

/// Polygonal curve x_0, ..., x_k with a time sense per segment. A segment
/// with TimeSense::None is degenerate (coincident endpoints).
struct PiecewiseCausalCurve {
  std::vector<Event> vertices;
  std::vector<TimeSense> senses;

  std::size_t segments() const { return senses.size(); }
};

/// Infers senses from the midpoint metric; throws InvalidSegment on a
/// spacelike segment or one that meets an excision.
PiecewiseCausalCurve make_curve(const Spacetime& st, std::vector<Event> vertices);
void validate_curve(const Spacetime& st, const PiecewiseCausalCurve& curve);
PiecewiseCausalCurve curve_from_path(const CausalGrid& grid, const NullPath& path);

/// Zigzag of j null teeth between points p, q of equal coordinate time in a
/// flat chart: up D/2j and down D/2j per tooth, D the spatial separation.
PiecewiseCausalCurve zigzag_witness(const Spacetime& st, const Vector& p, const Vector& q, int j);

/// Sum of |tau(x_i) - tau(x_{i-1})| over the breakpoints.
double null_length(const Spacetime& st, const PiecewiseCausalCurve& curve,
                   const TimeFunction& tau);

struct ZigzagParts {
  double future_len = 0.0;
  double past_len = 0.0;
};

ZigzagParts zigzag_decompose(const Spacetime& st, const PiecewiseCausalCurve& curve,
                             const TimeFunction& tau);

using DistanceOracle = std::function<double(const Vector&, const Vector&)>;
/// Point at parameter s in [0, 1] on the segment [a, b].
using PartitionRule = std::function<Vector(const Vector&, const Vector&, double)>;

Vector linear_partition(const Vector& a, const Vector& b, double s);

/// Sup over dyadic refinements (levels 0..depth) of the sum of oracle
/// distances between consecutive partition points.
double rectifiable_length(const std::vector<Vector>& polyline, const DistanceOracle& oracle,
                          int depth = 6, const PartitionRule& rule = linear_partition);
double rectifiable_length(const PiecewiseCausalCurve& curve, const DistanceOracle& oracle,
                          int depth = 6, const PartitionRule& rule = linear_partition);

/// Null distance between grid nodes, one Dijkstra field per source, cached.
/// Off-lattice points are rejected with NodeNotInGrid.
class GridDistanceOracle {
 public:
  explicit GridDistanceOracle(const CausalGrid& grid) : grid_(&grid) {}

  double operator()(const Vector& a, const Vector& b) const;
  /// Snaps the parameter to the lattice sites lying on the segment.
  Vector partition_point(const Vector& a, const Vector& b, double s) const;

  DistanceOracle oracle() const;
  PartitionRule rule() const;

 private:
  const CausalGrid* grid_;
  mutable std::unordered_map<NodeId, std::shared_ptr<const std::vector<double>>> cache_;
};

struct SmallZagsReport {
  bool ok = false;
  double past_len = 0.0;
  double future_len = 0.0;
  double null_len = 0.0;
  double excess = 0.0;  // null_len - d_hat(p, q)
};

/// Near-minimizers have small past parts: past_len < null_len - d_hat + tol.
SmallZagsReport small_zags_check(const Spacetime& st, const PiecewiseCausalCurve& curve,
                                 const TimeFunction& tau, double d_hat_pq,
                                 double tol = 1e-12);

struct NullDistanceResult {
  double estimate = 0.0;
  double lower_bound = 0.0;
  PiecewiseCausalCurve witness;
  bool encodes_equality = false;
};

enum class Verdict { CausalAndEqual, SpacelikeAndStrict, MissingCausal, CausalButStrict };

const char* verdict_name(Verdict v);

struct GridParams {
  Box box;
  double h = 0.05;
  StencilSpec stencil;
  int threads = 1;
};

struct EncodeResult {
  Verdict verdict = Verdict::SpacelikeAndStrict;
  double estimate = 0.0;
  double lower_bound = 0.0;
  double tol_eq = 0.0;
  bool reachable = false;
  bool properness_unverified = true;
  NodeId earlier = kNoNode;
  NodeId later = kNoNode;
};

/// 3 h times the stencil length bound.
double default_tol_eq(const CausalGrid& grid);

NullDistanceResult null_distance(const CausalGrid& grid, NodeId p, NodeId q, double tol_eq);

/// Compares null-distance equality with causal reachability. A negative
/// tol_eq selects default_tol_eq.
EncodeResult encodes_causality_test(const CausalGrid& grid, NodeId p, NodeId q,
                                    double tol_eq = -1.0);
EncodeResult encodes_causality_test(const Spacetime& st, const TimeFunction& tau,
                                    const Vector& p, const Vector& q, const GridParams& params,
                                    double tol_eq = -1.0);

struct BallPoint {
  Vector direction;
  Vector boundary;
  double distance_along_ray = 0.0;
  bool causal_direction = false;
};

/// Lattice-aligned box around `center` large enough for a ball of radius R.
Box ball_box(const Vector& center, double R, double h);

/// Boundary of the null-distance ball of radius R along rays from center.
std::vector<BallPoint> ball_boundary_sample(const Spacetime& st, const TimeFunction& tau,
                                            const Vector& center, double R,
                                            const std::vector<Vector>& directions,
                                            const GridParams& params);
/// n_dirs rays evenly spaced in the (x^0, x^1) plane.
std::vector<BallPoint> ball_boundary_sample(const Spacetime& st, const TimeFunction& tau,
                                            const Vector& center, double R, int n_dirs,
                                            const GridParams& params);

}  // namespace nulldist

#endif  // NULLDIST_NULL_DISTANCE_HPP
