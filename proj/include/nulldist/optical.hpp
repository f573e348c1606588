#ifndef NULLDIST_OPTICAL_HPP
#define NULLDIST_OPTICAL_HPP

#include <optional>
#include <vector>

#include "nulldist/causal_grid.hpp"
#include "nulldist/spacetime.hpp"

namespace nulldist {

/// Position and velocity along a geodesic.
struct GeodesicState {
  Vector x;
  Vector u;
};

/// RK4 integration of the geodesic equation from (x, u) over parameter s.
/// Null initial data is monitored: |g(u,u)| must stay below 1e-6 |u|^2.
GeodesicState geodesic_flow(const Spacetime& st, const Vector& x, const Vector& u, double s,
                            double step);
Event geodesic_shoot(const Spacetime& st, const Event& p, const TangentVector& v, double s,
                     double step);

/// Temple null chart built on a unit-speed timelike geodesic eta through p
/// with a parallel-transported orthonormal spacelike frame.
///   Phi(t, x) = exp_{eta(t)}(sum_i x_i e_i + |x| eta'(t))
class NullChart {
 public:
  struct Sample {
    Vector x;      // eta(t)
    Vector u;      // eta'(t)
    Matrix frame;  // columns e_1..e_n
  };

  const Spacetime& spacetime() const { return st_; }
  const Vector& base() const { return p_; }
  TimeSense sense() const { return sense_; }
  double eps() const { return eps_; }
  double domain_radius() const { return domain_radius_; }
  double shoot_step() const { return shoot_step_; }
  int spatial_dim() const { return st_.dim() - 1; }
  /// Largest deviation from orthonormality of (eta', e_1..e_n) over samples.
  double frame_drift() const { return frame_drift_; }

  /// eta and its frame at chart time t (any real t; integrated from the
  /// nearest stored sample).
  Sample eta_at(double t) const;

  friend NullChart build_chart(const Spacetime&, const Vector&, TimeSense, double, int);

 private:
  NullChart(Spacetime st) : st_(std::move(st)) {}

  Spacetime st_;
  Vector p_;
  TimeSense sense_ = TimeSense::Future;
  double eps_ = 0.0;
  double dt_ = 0.0;
  double shoot_step_ = 1.0 / 16.0;
  double domain_radius_ = 0.0;
  double frame_drift_ = 0.0;
  std::vector<Sample> samples_;  // t_k = -eps + k dt
};

/// `n_frame` transport steps on each side of p.
NullChart build_chart(const Spacetime& st, const Vector& p, TimeSense sense, double eps,
                      int n_frame = 64);

Vector chart_forward(const NullChart& chart, double t, const Vector& x);

struct OpticalValue {
  double omega = 0.0;
  double lambda = 0.0;
  std::optional<Vector> direction;  // empty on the axis
  double residual = 0.0;
  bool on_axis = false;

  /// Chart coordinates (t, x) as one vector.
  Vector chart_coords() const;
};

/// Damped Newton on (t, x); flat-frame seed first, then a coarse
/// (t, lambda, direction) seed grid.
OpticalValue chart_inverse(const NullChart& chart, const Vector& q, double tol = 1e-11);

struct MonotonicityReport {
  std::size_t causal_pairs = 0;
  std::size_t violations = 0;
  double worst_drop = 0.0;  // max of omega(q) - omega(q') over causal pairs
  std::size_t sign_samples = 0;
  std::size_t sign_failures = 0;
};

/// Along grid-causal pairs q <= q', omega(q') >= omega(q) - 1e-6; samples with
/// omega >= delta must lie in the grid future of the chart base.
MonotonicityReport omega_monotonicity_check(const NullChart& chart, const CausalGrid& grid,
                                            int n_samples, unsigned seed, double delta);

/// Chart-time pushforward X = dPhi/dt at q (eta' on the axis).
Vector optical_X(const NullChart& chart, const Vector& q);

/// g_R = 2 |g(X,X)|^{-1} g(X,.) g(X,.) + g.
MetricForm g_R_eval(const NullChart& chart, const Vector& q);

/// |grad omega|_{g_R} from finite differences of the inverse chart.
double grad_norm_omega(const NullChart& chart, const Vector& q);
/// sqrt(2 / |g(X,X)|), the closed form of the same quantity.
double grad_norm_formula(const NullChart& chart, const Vector& q);

struct LipschitzOptions {
  int n_pairs = 1000;
  double half_width = 0.0;  // 0: half the chart domain radius
  int points_per_axis = 11;
  unsigned seed = 7;
};

struct LipschitzReport {
  double max_ratio = 0.0;
  std::size_t pairs = 0;
  std::size_t lattice_nodes = 0;
};

/// sup |omega(q) - omega(q')| / d_{g_R}(q, q') over sampled lattice pairs,
/// d_{g_R} from shortest paths on a lattice with g_R edge lengths.
LipschitzReport lipschitz_estimate(const NullChart& chart, const LipschitzOptions& options = {});

}  // namespace nulldist

#endif  // NULLDIST_OPTICAL_HPP
