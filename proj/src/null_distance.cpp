#include "nulldist/null_distance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace nulldist {

namespace {

TimeSense segment_sense(const Spacetime& st, const Vector& a, const Vector& b) {
  const Vector delta = b - a;
  if (delta.cwiseAbs().maxCoeff() == 0.0) return TimeSense::None;
  const Vector mid = 0.5 * (a + b);
  const auto cc =
      causal_character(st.metric_unchecked(mid), st.orientation(mid), delta, kNullTol);
  if (!cc.causal()) {
    throw Error(Errc::InvalidSegment, "segment is spacelike at its midpoint");
  }
  if (!st.excisions().empty() && st.excision_segment_distance(a, b) <= 0.0) {
    throw Error(Errc::InvalidSegment, "segment meets an excised set");
  }
  return cc.time_sense;
}

}  // namespace

PiecewiseCausalCurve make_curve(const Spacetime& st, std::vector<Event> vertices) {
  if (vertices.empty()) throw Error(Errc::InvalidArgument, "curve needs at least one vertex");
  PiecewiseCausalCurve c;
  for (std::size_t i = 1; i < vertices.size(); ++i) {
    c.senses.push_back(segment_sense(st, vertices[i - 1].coords, vertices[i].coords));
  }
  c.vertices = std::move(vertices);
  return c;
}

void validate_curve(const Spacetime& st, const PiecewiseCausalCurve& curve) {
  if (curve.vertices.empty() || curve.senses.size() + 1 != curve.vertices.size()) {
    throw Error(Errc::InvalidSegment, "one sense per segment required");
  }
  for (std::size_t i = 0; i < curve.senses.size(); ++i) {
    const auto& a = curve.vertices[i].coords;
    const auto& b = curve.vertices[i + 1].coords;
    const TimeSense actual = segment_sense(st, a, b);
    if (actual != curve.senses[i]) {
      throw Error(Errc::InvalidSegment,
                  "segment " + std::to_string(i) + " does not have its claimed time sense");
    }
  }
}

PiecewiseCausalCurve curve_from_path(const CausalGrid& grid, const NullPath& path) {
  PiecewiseCausalCurve c;
  for (NodeId n : path.nodes) c.vertices.emplace_back(grid.coords(n));
  c.senses = path.senses;
  return c;
}

PiecewiseCausalCurve zigzag_witness(const Spacetime& st, const Vector& p, const Vector& q,
                                    int j) {
  if (j < 1) throw Error(Errc::InvalidArgument, "zigzag needs at least one tooth");
  if (p[0] != q[0]) throw Error(Errc::InvalidArgument, "zigzag endpoints need equal time");
  const Vector step = (q - p) / (2.0 * j);
  const double rise = step.norm();
  std::vector<Event> vertices{Event(p)};
  for (int k = 0; k < j; ++k) {
    Vector up = p + (2.0 * k + 1.0) * step;
    up[0] += rise;
    vertices.emplace_back(up);
    vertices.emplace_back(k + 1 == j ? q : Vector(p + (2.0 * k + 2.0) * step));
  }
  return make_curve(st, std::move(vertices));
}

double null_length(const Spacetime& st, const PiecewiseCausalCurve& curve,
                   const TimeFunction& tau) {
  validate_curve(st, curve);
  double total = 0.0;
  for (std::size_t i = 1; i < curve.vertices.size(); ++i) {
    total += std::abs(tau(curve.vertices[i]) - tau(curve.vertices[i - 1]));
  }
  return total;
}

ZigzagParts zigzag_decompose(const Spacetime& st, const PiecewiseCausalCurve& curve,
                             const TimeFunction& tau) {
  validate_curve(st, curve);
  ZigzagParts parts;
  for (std::size_t i = 0; i < curve.senses.size(); ++i) {
    const double dt = std::abs(tau(curve.vertices[i + 1]) - tau(curve.vertices[i]));
    if (curve.senses[i] == TimeSense::Future) parts.future_len += dt;
    if (curve.senses[i] == TimeSense::Past) parts.past_len += dt;
  }
  return parts;
}

Vector linear_partition(const Vector& a, const Vector& b, double s) { return a + s * (b - a); }

double rectifiable_length(const std::vector<Vector>& polyline, const DistanceOracle& oracle,
                          int depth, const PartitionRule& rule) {
  if (depth < 0) throw Error(Errc::InvalidArgument, "depth must be >= 0");
  if (polyline.size() < 2) return 0.0;
  double best = 0.0;
  for (int level = 0; level <= depth; ++level) {
    const int pieces = 1 << level;
    double sum = 0.0;
    for (std::size_t i = 1; i < polyline.size(); ++i) {
      Vector prev = polyline[i - 1];
      for (int j = 1; j <= pieces; ++j) {
        const Vector next =
            j == pieces ? polyline[i]
                        : rule(polyline[i - 1], polyline[i], static_cast<double>(j) / pieces);
        sum += oracle(prev, next);
        prev = next;
      }
    }
    best = std::max(best, sum);
  }
  return best;
}

double rectifiable_length(const PiecewiseCausalCurve& curve, const DistanceOracle& oracle,
                          int depth, const PartitionRule& rule) {
  std::vector<Vector> points;
  points.reserve(curve.vertices.size());
  for (const auto& e : curve.vertices) points.push_back(e.coords);
  return rectifiable_length(points, oracle, depth, rule);
}

double GridDistanceOracle::operator()(const Vector& a, const Vector& b) const {
  const NodeId na = grid_->require_node(a);
  const NodeId nb = grid_->require_node(b);
  if (na == nb) return 0.0;
  auto it = cache_.find(na);
  if (it == cache_.end()) {
    it = cache_
             .emplace(na, std::make_shared<const std::vector<double>>(
                              null_distance_field(*grid_, na)))
             .first;
  }
  const double d = (*it->second)[static_cast<std::size_t>(nb)];
  if (!std::isfinite(d)) throw Error(Errc::Disconnected, "grid nodes are not connected");
  return d;
}

Vector GridDistanceOracle::partition_point(const Vector& a, const Vector& b, double s) const {
  const double h = grid_->h();
  const int dim = grid_->dim();
  std::array<long long, kMaxDim> steps{};
  long long k = 0;
  for (int i = 0; i < dim; ++i) {
    steps[i] = std::llround((b[i] - a[i]) / h);
    k = std::gcd(k, std::llabs(steps[i]));
  }
  if (k == 0) return a;
  const long long j = std::llround(s * static_cast<double>(k));
  Vector out = a;
  for (int i = 0; i < dim; ++i) {
    out[i] = a[i] + static_cast<double>(j * (steps[i] / k)) * h;
  }
  return out;
}

DistanceOracle GridDistanceOracle::oracle() const {
  return [this](const Vector& a, const Vector& b) { return (*this)(a, b); };
}

PartitionRule GridDistanceOracle::rule() const {
  return [this](const Vector& a, const Vector& b, double s) { return partition_point(a, b, s); };
}

SmallZagsReport small_zags_check(const Spacetime& st, const PiecewiseCausalCurve& curve,
                                 const TimeFunction& tau, double d_hat_pq, double tol) {
  SmallZagsReport r;
  const auto parts = zigzag_decompose(st, curve, tau);
  r.future_len = parts.future_len;
  r.past_len = parts.past_len;
  r.null_len = parts.future_len + parts.past_len;
  r.excess = r.null_len - d_hat_pq;
  r.ok = r.past_len < r.excess + tol;
  return r;
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::CausalAndEqual: return "CausalAndEqual";
    case Verdict::SpacelikeAndStrict: return "SpacelikeAndStrict";
    case Verdict::MissingCausal: return "Violation(MissingCausal)";
    case Verdict::CausalButStrict: return "Violation(CausalButStrict)";
  }
  return "Unknown";
}

double default_tol_eq(const CausalGrid& grid) {
  return 3.0 * grid.h() * grid.stencil_length_bound();
}

NullDistanceResult null_distance(const CausalGrid& grid, NodeId p, NodeId q, double tol_eq) {
  const auto path = shortest_null_path(grid, p, q);
  NullDistanceResult r;
  r.estimate = path.estimate;
  r.lower_bound = std::abs(grid.tau(q) - grid.tau(p));
  r.witness = curve_from_path(grid, path);
  r.encodes_equality = r.estimate - r.lower_bound <= tol_eq;
  return r;
}

EncodeResult encodes_causality_test(const CausalGrid& grid, NodeId p, NodeId q,
                                    double tol_eq) {
  EncodeResult r;
  r.tol_eq = tol_eq < 0.0 ? default_tol_eq(grid) : tol_eq;
  r.earlier = p;
  r.later = q;
  if (grid.tau(q) < grid.tau(p)) std::swap(r.earlier, r.later);
  const auto path = shortest_null_path(grid, r.earlier, r.later);
  r.estimate = path.estimate;
  r.lower_bound = grid.tau(r.later) - grid.tau(r.earlier);
  r.reachable = reach(grid, r.earlier, TimeSense::Future).contains(r.later);
  r.properness_unverified = !grid.time_function().claims.proper;
  const bool equal = r.estimate - r.lower_bound <= r.tol_eq;
  if (equal && r.reachable) {
    r.verdict = Verdict::CausalAndEqual;
  } else if (!equal && !r.reachable) {
    r.verdict = Verdict::SpacelikeAndStrict;
  } else if (equal) {
    r.verdict = Verdict::MissingCausal;
  } else {
    r.verdict = Verdict::CausalButStrict;
  }
  return r;
}

EncodeResult encodes_causality_test(const Spacetime& st, const TimeFunction& tau,
                                    const Vector& p, const Vector& q, const GridParams& params,
                                    double tol_eq) {
  const auto grid = build_grid(st, tau, params.box, params.h, params.stencil, params.threads);
  return encodes_causality_test(grid, grid.require_node(p), grid.require_node(q), tol_eq);
}

Box ball_box(const Vector& center, double R, double h) {
  const double half = std::ceil((1.1 * R) / h + 2.0) * h;
  Box box{center, center};
  for (int k = 0; k < center.size(); ++k) {
    box.lo[k] = center[k] - half;
    box.hi[k] = center[k] + half;
  }
  return box;
}

std::vector<BallPoint> ball_boundary_sample(const Spacetime& st, const TimeFunction& tau,
                                            const Vector& center, double R,
                                            const std::vector<Vector>& directions,
                                            const GridParams& params) {
  if (!(R > 0.0)) throw Error(Errc::InvalidArgument, "ball radius must be positive");
  const auto grid = build_grid(st, tau, params.box, params.h, params.stencil, params.threads);
  const NodeId c = grid.require_node(center);
  const auto field = null_distance_field(grid, c);
  const auto d_hat = time_function_from_nodes(grid, field, "d_hat", {});
  const double h = grid.h();

  std::vector<BallPoint> out;
  for (const Vector& raw : directions) {
    BallPoint bp;
    bp.direction = raw.normalized();
    bp.causal_direction =
        causal_character(st.metric_unchecked(center), st.orientation(center), bp.direction)
            .causal();
    auto value_at = [&](double s) {
      const Vector x = center + s * bp.direction;
      if (!grid.box().contains(x, 1e-12)) {
        throw Error(Errc::BallExitsGrid, "ball boundary lies outside the grid box");
      }
      const double v = d_hat(x);
      return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };
    double lo = 0.0;
    double hi = 0.0;
    const double step = 0.5 * h;
    while (true) {
      hi = lo + step;
      if (value_at(hi) > R) break;
      lo = hi;
    }
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (value_at(mid) <= R ? lo : hi) = mid;
    }
    bp.distance_along_ray = lo;
    bp.boundary = center + lo * bp.direction;
    out.push_back(std::move(bp));
  }
  return out;
}

std::vector<BallPoint> ball_boundary_sample(const Spacetime& st, const TimeFunction& tau,
                                            const Vector& center, double R, int n_dirs,
                                            const GridParams& params) {
  if (n_dirs < 1) throw Error(Errc::InvalidArgument, "need at least one direction");
  std::vector<Vector> dirs;
  for (int k = 0; k < n_dirs; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / n_dirs;
    Vector d = Vector::Zero(st.dim());
    d[0] = std::cos(theta);
    d[1] = std::sin(theta);
    dirs.push_back(d);
  }
  return ball_boundary_sample(st, tau, center, R, dirs, params);
}

}  // namespace nulldist
