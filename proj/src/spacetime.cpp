#include "nulldist/spacetime.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

namespace nulldist {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::OutOfDomain: return "OutOfDomain";
    case Errc::ZeroVector: return "ZeroVector";
    case Errc::NotCausal: return "NotCausal";
    case Errc::UnknownName: return "UnknownName";
    case Errc::NonPositiveConformalFactor: return "NonPositiveConformalFactor";
    case Errc::CyclicGraph: return "CyclicGraph";
    case Errc::NoCausalPairs: return "NoCausalPairs";
    case Errc::EmptyGrid: return "EmptyGrid";
    case Errc::ExcisionSwallowsBox: return "ExcisionSwallowsBox";
    case Errc::GridTooLarge: return "GridTooLarge";
    case Errc::NodeNotInGrid: return "NodeNotInGrid";
    case Errc::Disconnected: return "Disconnected";
    case Errc::InvalidSegment: return "InvalidSegment";
    case Errc::BallExitsGrid: return "BallExitsGrid";
    case Errc::LeftDomain: return "LeftDomain";
    case Errc::StepTooLarge: return "StepTooLarge";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::OnAxisDegenerate: return "OnAxisDegenerate";
    case Errc::MapLeavesGrid: return "MapLeavesGrid";
    case Errc::SingularJacobian: return "SingularJacobian";
    case Errc::NonPositivePhi: return "NonPositivePhi";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::SceneParse: return "SceneParse";
  }
  return "Unknown";
}

bool MetricForm::is_symmetric(double tol) const {
  return (entries - entries.transpose()).cwiseAbs().maxCoeff() <= tol;
}

bool MetricForm::has_lorentz_signature() const {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(entries, Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();
  if (ev[0] >= 0.0) return false;
  for (Eigen::Index i = 1; i < ev.size(); ++i) {
    if (ev[i] <= 0.0) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Excisions

Excision Excision::half_line(Vector origin, Vector direction) {
  Excision e;
  e.kind = Kind::HalfLine;
  e.direction = direction.normalized();
  e.origin = std::move(origin);
  return e;
}

Excision Excision::ball(Vector center, double radius) {
  Excision e;
  e.kind = Kind::Ball;
  e.origin = std::move(center);
  e.radius = radius;
  return e;
}

double Excision::distance(const Vector& x) const {
  if (kind == Kind::Ball) {
    return std::max(0.0, (x - origin).norm() - radius);
  }
  const double s = std::max(0.0, (x - origin).dot(direction));
  return (x - origin - s * direction).norm();
}

namespace {

// Closest distance between segment [a, b] and the half-line origin + s*dir,
// s >= 0. Minimizes the convex squared distance over (u, s) in [0,1] x
// [0, inf) by checking the interior critical point and the boundaries.
double segment_ray_distance(const Vector& a, const Vector& b, const Vector& origin,
                            const Vector& dir) {
  const Vector d1 = b - a;
  const Vector r = a - origin;
  const double aa = d1.dot(d1);
  const double bb = d1.dot(dir);
  const double cc = dir.dot(dir);
  const double dd = d1.dot(r);
  const double ee = dir.dot(r);

  auto dist_at = [&](double u, double s) { return (r + u * d1 - s * dir).norm(); };
  auto clamp_s = [&](double u) { return std::max(0.0, (ee + u * bb) / cc); };

  double best = std::numeric_limits<double>::infinity();
  const double det = aa * cc - bb * bb;
  if (det > 1e-14 * aa * cc) {
    const double u = (bb * ee - cc * dd) / det;
    const double s = (aa * ee - bb * dd) / det;
    if (u >= 0.0 && u <= 1.0 && s >= 0.0) best = dist_at(u, s);
  }
  // Boundaries u = 0 and u = 1.
  best = std::min(best, dist_at(0.0, clamp_s(0.0)));
  best = std::min(best, dist_at(1.0, clamp_s(1.0)));
  // Boundary s = 0: point origin against the segment.
  if (aa > 0.0) {
    const double u = std::clamp(-dd / aa, 0.0, 1.0);
    best = std::min(best, dist_at(u, 0.0));
  }
  return best;
}

}  // namespace

double Excision::segment_distance(const Vector& a, const Vector& b) const {
  if (kind == Kind::Ball) {
    const Vector d = b - a;
    const double len2 = d.squaredNorm();
    double u = len2 > 0.0 ? (origin - a).dot(d) / len2 : 0.0;
    u = std::clamp(u, 0.0, 1.0);
    return std::max(0.0, (a + u * d - origin).norm() - radius);
  }
  return segment_ray_distance(a, b, origin, direction);
}

// ---------------------------------------------------------------------------
// Spacetime

Spacetime::Spacetime(Parts parts) : parts_(std::move(parts)) {
  if (parts_.dim < 2 || parts_.dim > kMaxDim) {
    throw Error(Errc::InvalidArgument, "spacetime dimension must be in [2, " +
                                           std::to_string(kMaxDim) + "]");
  }
  if (!parts_.region) parts_.region = [](const Vector&) { return true; };
  if (!parts_.orientation) {
    const int dim = parts_.dim;
    parts_.orientation = [dim](const Vector&) {
      Vector t = Vector::Zero(dim);
      t[0] = 1.0;
      return t;
    };
  }
}

bool Spacetime::in_domain(const Vector& x) const {
  if (x.size() != dim() || !x.allFinite()) return false;
  if (!parts_.region(x)) return false;
  for (const auto& e : parts_.excisions) {
    if (e.distance(x) <= 0.0) return false;
  }
  return true;
}

double Spacetime::excision_distance(const Vector& x) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& e : parts_.excisions) best = std::min(best, e.distance(x));
  return best;
}

double Spacetime::excision_segment_distance(const Vector& a, const Vector& b) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& e : parts_.excisions) best = std::min(best, e.segment_distance(a, b));
  return best;
}

MetricDerivatives Spacetime::metric_derivatives(const Vector& x) const {
  if (parts_.metric_derivatives) return parts_.metric_derivatives(x);
  return metric_derivatives_fd(parts_.metric, dim(), x, 1e-5 * parts_.coord_scale);
}

MetricDerivatives metric_derivatives_fd(const MetricField& metric, int dim, const Vector& x,
                                        double step) {
  MetricDerivatives d;
  Vector xp = x;
  Vector xm = x;
  for (int k = 0; k < dim; ++k) {
    xp[k] = x[k] + step;
    xm[k] = x[k] - step;
    d[k] = (metric(xp) - metric(xm)) / (2.0 * step);
    xp[k] = x[k];
    xm[k] = x[k];
  }
  return d;
}

MetricDerivatives christoffel(const Spacetime& st, const Vector& x) {
  const int n = st.dim();
  const Matrix g = st.metric_unchecked(x);
  const Matrix ginv = g.inverse();
  const MetricDerivatives dg = st.metric_derivatives(x);

  // First kind: G_d(b,c) = 1/2 (d_b g_dc + d_c g_db - d_d g_bc)
  MetricDerivatives first;
  for (int d = 0; d < n; ++d) {
    first[d].setZero(n, n);
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < n; ++c) {
        first[d](b, c) = 0.5 * (dg[b](d, c) + dg[c](d, b) - dg[d](b, c));
      }
    }
  }
  MetricDerivatives gamma;
  for (int a = 0; a < n; ++a) {
    gamma[a].setZero(n, n);
    for (int d = 0; d < n; ++d) {
      if (ginv(a, d) != 0.0) gamma[a] += ginv(a, d) * first[d];
    }
  }
  return gamma;
}

MetricForm metric_eval(const Spacetime& st, const Event& p) {
  if (p.dim() != st.dim()) {
    throw Error(Errc::InvalidArgument, "event dimension does not match spacetime");
  }
  if (!st.in_domain(p.coords)) {
    throw Error(Errc::OutOfDomain, "event outside the domain of " + st.name());
  }
  return MetricForm{st.metric_unchecked(p.coords)};
}

CausalCharacter causal_character(const Matrix& g, const Vector& orientation, const Vector& v,
                                 double tol) {
  if (!(tol > 0.0)) throw Error(Errc::InvalidArgument, "tolerance must be positive");
  if (v.cwiseAbs().maxCoeff() < tol) throw Error(Errc::ZeroVector, "zero tangent vector");
  const double q = v.dot(g * v);
  const double scale = v.squaredNorm();
  CausalKind kind;
  if (std::abs(q) <= tol * scale) {
    kind = CausalKind::Null;
  } else if (q < 0.0) {
    kind = CausalKind::Timelike;
  } else {
    return {CausalKind::Spacelike, TimeSense::None};
  }
  const double pairing = orientation.dot(g * v);
  return {kind, pairing < 0.0 ? TimeSense::Future : TimeSense::Past};
}

CausalCharacter causal_character(const MetricForm& g, const TangentVector& orientation,
                                 const TangentVector& v, double tol) {
  return causal_character(g.entries, orientation.components, v.components, tol);
}

double reverse_cs_gap(const MetricForm& g, const TangentVector& u, const TangentVector& v,
                      double tol) {
  // Causal pairs only; the sign of the pairing is irrelevant.
  for (const Vector* w : {&u.components, &v.components}) {
    const double q = g(*w, *w);
    if (q > tol * w->squaredNorm()) {
      throw Error(Errc::NotCausal, "reverse Cauchy-Schwarz needs causal vectors");
    }
  }
  const double norm_u = std::sqrt(std::abs(g(u.components, u.components)));
  const double norm_v = std::sqrt(std::abs(g(v.components, v.components)));
  return std::abs(g(u.components, v.components)) - norm_u * norm_v;
}

// ---------------------------------------------------------------------------
// Built-in spacetimes

namespace {

Matrix eta(int dim) {
  Matrix g = Matrix::Identity(dim, dim);
  g(0, 0) = -1.0;
  return g;
}

MetricDerivatives zero_derivatives(int dim) {
  MetricDerivatives d;
  for (int k = 0; k < dim; ++k) d[k] = Matrix::Zero(dim, dim);
  return d;
}

void require_dim(int dim) {
  if (dim < 2 || dim > kMaxDim) {
    throw Error(Errc::InvalidArgument, "dimension must be in [2, " +
                                           std::to_string(kMaxDim) + "], got " +
                                           std::to_string(dim));
  }
}

}  // namespace

Spacetime minkowski(int dim) {
  require_dim(dim);
  Spacetime::Parts parts;
  parts.name = "minkowski";
  parts.dim = dim;
  parts.metric = [dim](const Vector&) { return eta(dim); };
  parts.metric_derivatives = [dim](const Vector&) { return zero_derivatives(dim); };
  return Spacetime(std::move(parts));
}

Spacetime upper_half_minkowski(int dim) {
  require_dim(dim);
  Spacetime::Parts parts;
  parts.name = "upper_half_minkowski";
  parts.dim = dim;
  parts.metric = [dim](const Vector&) { return eta(dim); };
  parts.metric_derivatives = [dim](const Vector&) { return zero_derivatives(dim); };
  parts.region = [](const Vector& x) { return x[0] > 0.0; };
  parts.cosmological_time = [](const Vector& x) { return x[0]; };
  return Spacetime(std::move(parts));
}

Spacetime missing_ray(int dim, double ray_start) {
  require_dim(dim);
  if (!(ray_start > 0.0)) {
    throw Error(Errc::InvalidArgument, "missing_ray needs ray_start > 0");
  }
  Spacetime::Parts parts;
  parts.name = "missing_ray";
  parts.dim = dim;
  parts.metric = [dim](const Vector&) { return eta(dim); };
  parts.metric_derivatives = [dim](const Vector&) { return zero_derivatives(dim); };
  parts.region = [](const Vector& x) { return x[0] > 0.0; };
  Vector origin = Vector::Zero(dim);
  origin[0] = ray_start;
  Vector dir = Vector::Zero(dim);
  dir[0] = 1.0;
  parts.excisions.push_back(Excision::half_line(origin, dir));
  // Every past-inextendible timelike curve still reaches t = 0 off the ray.
  parts.cosmological_time = [](const Vector& x) { return x[0]; };
  return Spacetime(std::move(parts));
}

Spacetime warped_product(int dim, double scale, double power) {
  require_dim(dim);
  if (!(scale > 0.0)) throw Error(Errc::InvalidArgument, "warp scale must be positive");
  Spacetime::Parts parts;
  parts.name = "warped_product";
  parts.dim = dim;
  auto warp = [scale, power](double t) { return scale * std::pow(t, power); };
  auto warp_dt = [scale, power](double t) { return scale * power * std::pow(t, power - 1.0); };
  parts.metric = [dim, warp](const Vector& x) {
    Matrix g = Matrix::Identity(dim, dim);
    const double f = warp(x[0]);
    g *= f * f;
    g(0, 0) = -1.0;
    return g;
  };
  parts.metric_derivatives = [dim, warp, warp_dt](const Vector& x) {
    MetricDerivatives d = zero_derivatives(dim);
    const double df2 = 2.0 * warp(x[0]) * warp_dt(x[0]);
    for (int i = 1; i < dim; ++i) d[0](i, i) = df2;
    return d;
  };
  parts.region = [](const Vector& x) { return x[0] > 0.0; };
  // Every causal curve has |dt| >= proper time, and the t-lines are
  // geodesics reaching t = 0.
  parts.cosmological_time = [](const Vector& x) { return x[0]; };
  return Spacetime(std::move(parts));
}

Spacetime conformal(const Spacetime& base, double phi) {
  if (!(phi > 0.0) || !std::isfinite(phi)) {
    throw Error(Errc::NonPositiveConformalFactor, "conformal factor must be positive");
  }
  const auto shared = std::make_shared<const Spacetime>(base);
  Spacetime::Parts parts = base.parts();
  parts.name = "conformal";
  const double phi2 = phi * phi;
  parts.metric = [shared, phi2](const Vector& x) {
    return Matrix(phi2 * shared->metric_unchecked(x));
  };
  parts.metric_derivatives = [shared, phi2](const Vector& x) {
    MetricDerivatives d = shared->metric_derivatives(x);
    for (int k = 0; k < shared->dim(); ++k) d[k] *= phi2;
    return d;
  };
  if (base.has_analytic_cosmological_time()) {
    const ScalarField tau = base.analytic_cosmological_time();
    parts.cosmological_time = [tau, phi](const Vector& x) { return phi * tau(x); };
  }
  return Spacetime(std::move(parts));
}

Spacetime conformal(const Spacetime& base, ScalarField phi, std::string label) {
  const auto shared = std::make_shared<const Spacetime>(base);
  Spacetime::Parts parts = base.parts();
  parts.name = std::move(label);
  parts.metric = [shared, phi](const Vector& x) {
    const double f = phi(x);
    if (!(f > 0.0)) {
      throw Error(Errc::NonPositiveConformalFactor, "conformal factor must be positive");
    }
    return Matrix(f * f * shared->metric_unchecked(x));
  };
  parts.metric_derivatives = nullptr;
  parts.cosmological_time = nullptr;
  return Spacetime(std::move(parts));
}

Spacetime builtin(std::string_view name, const BuiltinParams& params) {
  if (name == "minkowski") return minkowski(params.dim);
  if (name == "upper_half_minkowski") return upper_half_minkowski(params.dim);
  if (name == "missing_ray") return missing_ray(params.dim, params.get("ray_start", 2.0));
  if (name == "warped_product") {
    return warped_product(params.dim, params.get("scale", 1.0), params.get("power", 1.0));
  }
  if (name == "conformal") {
    if (params.base == nullptr) {
      throw Error(Errc::InvalidArgument, "conformal needs a base spacetime");
    }
    return conformal(*params.base, params.get("phi", 1.0));
  }
  throw Error(Errc::UnknownName, "unknown spacetime '" + std::string(name) + "'");
}

}  // namespace nulldist
