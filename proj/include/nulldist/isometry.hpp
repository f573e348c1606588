#ifndef NULLDIST_ISOMETRY_HPP
#define NULLDIST_ISOMETRY_HPP

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "nulldist/causal_grid.hpp"
#include "nulldist/spacetime.hpp"
#include "nulldist/time_function.hpp"

namespace nulldist {

/// Coordinate map between spacetimes: closed form, or a bijection table on
/// sampled nodes.
class PointMap {
 public:
  using Fn = std::function<Vector(const Vector&)>;

  static PointMap closed_form(std::string name, Fn forward, Fn inverse = nullptr);
  static PointMap table(std::string name, std::vector<std::pair<Vector, Vector>> pairs);

  const std::string& name() const { return name_; }
  bool is_closed_form() const { return static_cast<bool>(forward_); }
  bool has_inverse() const { return static_cast<bool>(inverse_) || !pairs_.empty(); }
  const std::vector<std::pair<Vector, Vector>>& pairs() const { return pairs_; }

  /// Throws MapLeavesGrid for a table point not in the table.
  Vector operator()(const Vector& x) const;
  PointMap inverse() const;

 private:
  std::string name_;
  Fn forward_;
  Fn inverse_;
  std::vector<std::pair<Vector, Vector>> pairs_;
};

PointMap identity_map();
PointMap translation_map(const Vector& shift);
PointMap dilation_map(double factor);
/// Rotation by `angle` in the (x^i, x^j) plane, i, j >= 1.
PointMap spatial_rotation_map(int i, int j, double angle);
/// Known names: identity, translation (shift), dilation (factor), rotation
/// (i, j, angle).
PointMap named_map(const std::string& name, const std::vector<double>& args, int dim);

struct PreservingReport {
  double d_hat_dev = 0.0;
  double tau_dev = 0.0;
  std::size_t pairs = 0;
  double tol = 0.0;
  bool passes = false;
};

/// Max |d1(p,q) - d2(F p, F q)| and |tau1(p) - tau2(F p)| over sampled node
/// pairs of grid1; the time functions are those the grids were built with.
PreservingReport check_preserving(const PointMap& map, const CausalGrid& grid1,
                                  const CausalGrid& grid2, int n_pairs = 200,
                                  double tol = 1e-9, unsigned seed = 42);

enum class ConformalVerdict { Isometry, ConformalNotIsometric, NotConformal };

const char* conformal_verdict_name(ConformalVerdict v);

struct PhiSample {
  Event at;
  double phi = 0.0;
};

struct ConformalFactor {
  double phi = 0.0;
  double dispersion = 0.0;  // (max - min) / mean of the ratios
  bool conformal = false;
  ConformalVerdict verdict = ConformalVerdict::NotConformal;
};

/// phi^2 = (J^T g2 J)(v, v) / g1(v, v) averaged over causal test vectors,
/// J by central differences.
ConformalFactor conformal_factor(const PointMap& map, const Spacetime& st1, const Spacetime& st2,
                                 const Vector& p, double fd_step = 1e-5);

struct ConformalReport {
  std::vector<PhiSample> phi_samples;
  double vol_n = 0.0;
  double vol_nm1 = 0.0;
  double max_phi_dev = 0.0;  // max |phi - 1| over every cell
  double max_grad_tau_dev = 0.0;  // max ||grad tau|_g - 1| over the samples
  std::size_t cells = 0;
  ConformalVerdict verdict = ConformalVerdict::NotConformal;
  bool below_theorem_dimension = false;  // n = 1
};

/// Midpoint sums of phi^n and phi^(n-1) against sqrt|det g1| over cells of
/// size about h covering `region`; n + 1 = dim.
ConformalReport coarea_volume_compare(const Spacetime& st1, const ScalarField& phi,
                                      const TimeFunction& tau1, const Box& region, double h,
                                      double tol = 1e-3);

struct RehearsalReport {
  PreservingReport coordinate_times;  // tau2 = t on phi^2 g
  PreservingReport cosmological_times;  // tau2 = numeric cosmological time of phi^2 g
  bool passes = false;  // first preserves, second does not
};

/// Identity from upper-half Minkowski to its constant rescaling by phi^2.
RehearsalReport rigidity_rehearsal(int dim, double phi, const Box& box, double h,
                                   int n_pairs = 100, unsigned seed = 42);

}  // namespace nulldist

#endif  // NULLDIST_ISOMETRY_HPP
