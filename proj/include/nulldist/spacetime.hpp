#ifndef NULLDIST_SPACETIME_HPP
#define NULLDIST_SPACETIME_HPP

#include <array>
#include <cmath>
#include <functional>
#include <initializer_list>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nulldist/types.hpp"

namespace nulldist {

inline Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

/// g(u, v) for arbitrary Eigen expressions.
template <typename DG, typename DU, typename DV>
typename DG::Scalar interval(const Eigen::MatrixBase<DG>& g, const Eigen::MatrixBase<DU>& u,
                             const Eigen::MatrixBase<DV>& v) {
  return u.dot(g * v);
}

/// |g(v, v)|^(1/2).
template <typename DG, typename DV>
typename DG::Scalar lorentz_norm(const Eigen::MatrixBase<DG>& g, const Eigen::MatrixBase<DV>& v) {
  using std::abs;
  using std::sqrt;
  return sqrt(abs(interval(g, v, v)));
}

struct Event {
  Vector coords;
  int chart_id = 0;

  Event() = default;
  Event(Vector c, int chart = 0) : coords(std::move(c)), chart_id(chart) {}
  Event(std::initializer_list<double> c) : coords(vec(c)) {}

  int dim() const { return static_cast<int>(coords.size()); }
  double operator[](int k) const { return coords[k]; }
};

struct TangentVector {
  Event base;
  Vector components;
};

/// Lorentzian metric components at a point, signature (-,+,...,+).
struct MetricForm {
  Matrix entries;

  int dim() const { return static_cast<int>(entries.rows()); }
  double operator()(const Vector& u, const Vector& v) const {
    return u.dot(entries * v);
  }
  bool is_symmetric(double tol = 1e-12) const;
  bool has_lorentz_signature() const;
};

enum class CausalKind { Timelike, Null, Spacelike };

struct CausalCharacter {
  CausalKind kind;
  TimeSense time_sense;

  bool causal() const { return kind != CausalKind::Spacelike; }
  bool future_causal() const { return causal() && time_sense == TimeSense::Future; }
  bool past_causal() const { return causal() && time_sense == TimeSense::Past; }
  friend bool operator==(const CausalCharacter&, const CausalCharacter&) = default;
};

/// Removed closed set: a half-line {origin + s*direction : s >= 0} or a
/// closed ball. Distances are Euclidean in coordinates.
struct Excision {
  enum class Kind { HalfLine, Ball };

  Kind kind = Kind::HalfLine;
  Vector origin;
  Vector direction;  // unit, HalfLine only
  double radius = 0.0;  // Ball only

  static Excision half_line(Vector origin, Vector direction);
  static Excision ball(Vector center, double radius);

  double distance(const Vector& x) const;
  double segment_distance(const Vector& a, const Vector& b) const;
};

using ScalarField = std::function<double(const Vector&)>;
using MetricField = std::function<Matrix(const Vector&)>;
using MetricDerivatives = std::array<Matrix, kMaxDim>;
using MetricDerivativeField = std::function<MetricDerivatives(const Vector&)>;
using VectorField = std::function<Vector(const Vector&)>;
using Predicate = std::function<bool(const Vector&)>;

/// An analytic Lorentzian spacetime (N, g) on a coordinate region.
/// Immutable after construction.
class Spacetime {
 public:
  struct Parts {
    std::string name;
    int dim = 0;
    MetricField metric;
    Predicate region;  // analytic region before excisions
    std::vector<Excision> excisions;
    VectorField orientation;  // future timelike field
    MetricDerivativeField metric_derivatives;  // optional closed form
    ScalarField cosmological_time;  // optional analytic tau_AGH
    double coord_scale = 1.0;
  };

  explicit Spacetime(Parts parts);

  const std::string& name() const { return parts_.name; }
  int dim() const { return parts_.dim; }
  double coord_scale() const { return parts_.coord_scale; }
  const std::vector<Excision>& excisions() const { return parts_.excisions; }

  bool in_region(const Vector& x) const { return parts_.region(x); }
  /// Exact domain predicate: inside the region and off every excision.
  bool in_domain(const Vector& x) const;
  /// Euclidean distance from x to the nearest excision (+inf if none).
  double excision_distance(const Vector& x) const;
  double excision_segment_distance(const Vector& a, const Vector& b) const;

  /// Metric components with no domain check.
  Matrix metric_unchecked(const Vector& x) const { return parts_.metric(x); }
  Vector orientation(const Vector& x) const { return parts_.orientation(x); }
  MetricDerivatives metric_derivatives(const Vector& x) const;
  bool has_analytic_cosmological_time() const {
    return static_cast<bool>(parts_.cosmological_time);
  }
  const ScalarField& analytic_cosmological_time() const {
    return parts_.cosmological_time;
  }

  const Parts& parts() const { return parts_; }

 private:
  Parts parts_;
};

MetricForm metric_eval(const Spacetime& st, const Event& p);

inline constexpr double kNullTol = 1e-9;

CausalCharacter causal_character(const MetricForm& g, const TangentVector& orientation,
                                 const TangentVector& v, double tol = kNullTol);
CausalCharacter causal_character(const Matrix& g, const Vector& orientation,
                                 const Vector& v, double tol = kNullTol);

/// |g(u,v)| - |u|_g |v|_g. Nonnegative for causal pairs.
double reverse_cs_gap(const MetricForm& g, const TangentVector& u, const TangentVector& v,
                      double tol = kNullTol);

/// Christoffel symbols of the second kind; result[a](b, c) = Gamma^a_{bc}.
MetricDerivatives christoffel(const Spacetime& st, const Vector& x);

/// Central finite-difference metric derivatives, step 1e-5 * coord_scale.
MetricDerivatives metric_derivatives_fd(const MetricField& metric, int dim,
                                        const Vector& x, double step);

struct BuiltinParams {
  int dim = 4;
  std::map<std::string, double> values;
  const Spacetime* base = nullptr;  // conformal only

  double get(const std::string& key, double fallback) const {
    auto it = values.find(key);
    return it == values.end() ? fallback : it->second;
  }
};

/// Known names: minkowski, upper_half_minkowski, missing_ray,
/// warped_product, conformal.
Spacetime builtin(std::string_view name, const BuiltinParams& params = {});

Spacetime minkowski(int dim);
Spacetime upper_half_minkowski(int dim);
/// {t > 0} minus the half-line {(t, 0, ..., 0) : t >= ray_start}.
Spacetime missing_ray(int dim, double ray_start = 2.0);
/// -dt^2 + (scale * t^power)^2 delta on {t > 0}.
Spacetime warped_product(int dim, double scale = 1.0, double power = 1.0);
/// phi^2 g for a constant phi > 0.
Spacetime conformal(const Spacetime& base, double phi);
/// phi(x)^2 g for a positive function phi.
Spacetime conformal(const Spacetime& base, ScalarField phi, std::string label);

}  // namespace nulldist

#endif  // NULLDIST_SPACETIME_HPP
