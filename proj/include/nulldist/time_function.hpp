#ifndef NULLDIST_TIME_FUNCTION_HPP
#define NULLDIST_TIME_FUNCTION_HPP

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "nulldist/spacetime.hpp"

namespace nulldist {

class CausalGrid;

struct TimeClaims {
  bool generalized = false;
  bool anti_lipschitz = false;
  bool proper = false;
  bool cosmological = false;
};

/// A (generalized) time function tau together with what is claimed about it.
struct TimeFunction {
  std::string name;
  ScalarField eval;
  TimeClaims claims;
  double range_sup = std::numeric_limits<double>::infinity();

  double operator()(const Vector& x) const { return eval(x); }
  double operator()(const Event& p) const { return eval(p.coords); }
};

/// tau = x^0. Claims follow the spacetime: cosmological on the t > 0
/// built-ins, proper only on upper-half Minkowski.
TimeFunction coordinate_time(const Spacetime& st);
/// tau = (x^0)^3, which is not anti-Lipschitz near t = 0.
TimeFunction cubed_time(const Spacetime& st);
/// tau = a x^0 + b with a > 0.
TimeFunction affine_time(const Spacetime& st, double a, double b);
/// Analytic cosmological time when the spacetime knows it.
TimeFunction analytic_cosmological_time(const Spacetime& st);
/// Piecewise multilinear interpolation of per-node values on a grid.
TimeFunction time_function_from_nodes(const CausalGrid& grid, std::vector<double> values,
                                      std::string name, TimeClaims claims);

/// Longest-path estimate of the cosmological time at every grid node.
/// Lattice chains only, so this bounds tau_AGH from below.
std::vector<double> cosmological_time_numeric(const CausalGrid& grid);

struct AntiLipschitzViolation {
  NodeId earlier;
  NodeId later;
  double tau_gap;
  double distance;
};

struct AntiLipschitzReport {
  Box region;
  double lambda_best = 0.0;
  std::vector<AntiLipschitzViolation> violations;
  std::size_t pairs_tested = 0;
  NodeId argmin_earlier = kNoNode;
  NodeId argmin_later = kNoNode;
};

struct AntiLipschitzOptions {
  int n_sources = 64;  // reach sources sampled in the region
  unsigned seed = 42;
  bool vertical_only = false;  // only pairs differing in x^0 alone
};

/// Best constant lambda with tau(q) - tau(q') >= lambda |q - q'| over sampled
/// causal pairs inside `region`. Every directed edge in the region is
/// tested, plus reach sets from sampled sources.
AntiLipschitzReport check_anti_lipschitz(const CausalGrid& grid, const TimeFunction& tau,
                                         const Box& region,
                                         const AntiLipschitzOptions& options = {});

struct RegularityReport {
  bool regular = false;
  bool all_finite = false;
  double eps_reg = 0.0;
  double max_final_abs_tau = 0.0;
  std::size_t final_nodes = 0;
};

/// Finite everywhere and tending to zero at the past ends of maximal
/// past-directed chains (within 2 h times the stencil length bound).
RegularityReport check_regularity(const CausalGrid& grid, const TimeFunction& tau);

}  // namespace nulldist

#endif  // NULLDIST_TIME_FUNCTION_HPP
