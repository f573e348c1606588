#include "nulldist/isometry.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

namespace nulldist {

PointMap PointMap::closed_form(std::string name, Fn forward, Fn inverse) {
  PointMap m;
  m.name_ = std::move(name);
  m.forward_ = std::move(forward);
  m.inverse_ = std::move(inverse);
  return m;
}

PointMap PointMap::table(std::string name, std::vector<std::pair<Vector, Vector>> pairs) {
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    for (std::size_t j = i + 1; j < pairs.size(); ++j) {
      if ((pairs[i].first - pairs[j].first).cwiseAbs().maxCoeff() < 1e-12 ||
          (pairs[i].second - pairs[j].second).cwiseAbs().maxCoeff() < 1e-12) {
        throw Error(Errc::InvalidArgument, "node table is not a bijection");
      }
    }
  }
  PointMap m;
  m.name_ = std::move(name);
  m.pairs_ = std::move(pairs);
  return m;
}

Vector PointMap::operator()(const Vector& x) const {
  if (forward_) return forward_(x);
  for (const auto& [from, to] : pairs_) {
    if (from.size() == x.size() && (from - x).cwiseAbs().maxCoeff() < 1e-9) return to;
  }
  throw Error(Errc::MapLeavesGrid, "point is not in the map table");
}

PointMap PointMap::inverse() const {
  if (forward_) {
    if (!inverse_) throw Error(Errc::InvalidArgument, name_ + " has no inverse");
    return closed_form(name_ + "^-1", inverse_, forward_);
  }
  std::vector<std::pair<Vector, Vector>> flipped;
  flipped.reserve(pairs_.size());
  for (const auto& [from, to] : pairs_) flipped.emplace_back(to, from);
  PointMap m;
  m.name_ = name_ + "^-1";
  m.pairs_ = std::move(flipped);
  return m;
}

PointMap identity_map() {
  auto id = [](const Vector& x) { return x; };
  return PointMap::closed_form("identity", id, id);
}

PointMap translation_map(const Vector& shift) {
  return PointMap::closed_form(
      "translation", [shift](const Vector& x) -> Vector { return x + shift; },
      [shift](const Vector& x) -> Vector { return x - shift; });
}

PointMap dilation_map(double factor) {
  if (factor == 0.0) throw Error(Errc::InvalidArgument, "dilation factor must be nonzero");
  return PointMap::closed_form(
      "dilation", [factor](const Vector& x) -> Vector { return factor * x; },
      [factor](const Vector& x) -> Vector { return x / factor; });
}

PointMap spatial_rotation_map(int i, int j, double angle) {
  if (i < 1 || j < 1 || i == j) {
    throw Error(Errc::InvalidArgument, "rotation needs two distinct spatial axes");
  }
  auto rotate = [i, j](double a) {
    return [i, j, a](const Vector& x) -> Vector {
      if (std::max(i, j) >= x.size()) throw Error(Errc::InvalidArgument, "axis out of range");
      Vector y = x;
      y[i] = std::cos(a) * x[i] - std::sin(a) * x[j];
      y[j] = std::sin(a) * x[i] + std::cos(a) * x[j];
      return y;
    };
  };
  return PointMap::closed_form("rotation", rotate(angle), rotate(-angle));
}

PointMap named_map(const std::string& name, const std::vector<double>& args, int dim) {
  if (name == "identity") return identity_map();
  if (name == "translation") {
    if (static_cast<int>(args.size()) != dim) {
      throw Error(Errc::InvalidArgument, "translation needs one shift per coordinate");
    }
    Vector shift(dim);
    for (int k = 0; k < dim; ++k) shift[k] = args[static_cast<std::size_t>(k)];
    return translation_map(shift);
  }
  if (name == "dilation") {
    if (args.size() != 1) throw Error(Errc::InvalidArgument, "dilation needs a factor");
    return dilation_map(args[0]);
  }
  if (name == "rotation") {
    if (args.size() != 3) throw Error(Errc::InvalidArgument, "rotation needs i, j, angle");
    return spatial_rotation_map(static_cast<int>(args[0]), static_cast<int>(args[1]), args[2]);
  }
  throw Error(Errc::UnknownName, "unknown map '" + name + "'");
}

namespace {

double deviation(double a, double b) {
  if (std::isinf(a) && std::isinf(b)) return 0.0;
  return std::abs(a - b);
}

}  // namespace

PreservingReport check_preserving(const PointMap& map, const CausalGrid& grid1,
                                  const CausalGrid& grid2, int n_pairs, double tol,
                                  unsigned seed) {
  if (grid1.node_count() < 2) throw Error(Errc::EmptyGrid, "source grid needs two nodes");
  auto image = [&](NodeId n) {
    const Vector y = map(grid1.coords(n));
    const NodeId m = grid2.find_node(y);
    if (m == kNoNode) throw Error(Errc::MapLeavesGrid, "image point is not a target node");
    return m;
  };

  PreservingReport report;
  report.tol = tol;
  std::mt19937 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, grid1.node_count() - 1);
  const int sources = std::max(1, std::min(n_pairs, 20));
  const int per_source = (n_pairs + sources - 1) / sources;
  for (int s = 0; s < sources; ++s) {
    const auto p = static_cast<NodeId>(pick(rng));
    const NodeId fp = image(p);
    report.tau_dev = std::max(report.tau_dev, std::abs(grid1.tau(p) - grid2.tau(fp)));
    const auto d1 = null_distance_field(grid1, p);
    const auto d2 = null_distance_field(grid2, fp);
    for (int k = 0; k < per_source; ++k) {
      const auto q = static_cast<NodeId>(pick(rng));
      const NodeId fq = image(q);
      report.tau_dev = std::max(report.tau_dev, std::abs(grid1.tau(q) - grid2.tau(fq)));
      report.d_hat_dev =
          std::max(report.d_hat_dev, deviation(d1[static_cast<std::size_t>(q)],
                                               d2[static_cast<std::size_t>(fq)]));
      ++report.pairs;
    }
  }
  report.passes = report.d_hat_dev <= tol && report.tau_dev <= tol;
  return report;
}

const char* conformal_verdict_name(ConformalVerdict v) {
  switch (v) {
    case ConformalVerdict::Isometry: return "Isometry";
    case ConformalVerdict::ConformalNotIsometric: return "ConformalNotIsometric";
    case ConformalVerdict::NotConformal: return "NotConformal";
  }
  return "Unknown";
}

ConformalFactor conformal_factor(const PointMap& map, const Spacetime& st1, const Spacetime& st2,
                                 const Vector& p, double fd_step) {
  if (!map.is_closed_form()) {
    throw Error(Errc::InvalidArgument, "conformal factor needs a closed-form map");
  }
  if (!st1.in_domain(p)) throw Error(Errc::OutOfDomain, "point outside the source domain");
  const int dim = st1.dim();
  Matrix jac(dim, dim);
  for (int k = 0; k < dim; ++k) {
    Vector pp = p;
    Vector pm = p;
    pp[k] += fd_step;
    pm[k] -= fd_step;
    jac.col(k) = (map(pp) - map(pm)) / (2.0 * fd_step);
  }
  if (std::abs(jac.determinant()) < 1e-12) {
    throw Error(Errc::SingularJacobian, "map Jacobian is singular");
  }
  const Vector fp = map(p);
  if (!st2.in_domain(fp)) throw Error(Errc::OutOfDomain, "image outside the target domain");
  const Matrix g1 = st1.metric_unchecked(p);
  const Matrix pulled = jac.transpose() * st2.metric_unchecked(fp) * jac;

  // Timelike test vectors e0, e0 +- e_i / 2 and e0 + (e_i + e_j) / (2 sqrt 2).
  std::vector<Vector> tests;
  Vector e0 = Vector::Zero(dim);
  e0[0] = 1.0;
  tests.push_back(e0);
  for (int i = 1; i < dim; ++i) {
    for (double s : {-0.5, 0.5}) {
      Vector v = e0;
      v[i] = s;
      tests.push_back(v);
    }
    for (int j = i + 1; j < dim; ++j) {
      Vector v = e0;
      v[i] = v[j] = 0.5 / std::sqrt(2.0);
      tests.push_back(v);
    }
  }

  ConformalFactor out;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double sum = 0.0;
  int count = 0;
  for (const Vector& v : tests) {
    const double base = interval(g1, v, v);
    if (std::abs(base) < 1e-9 * v.squaredNorm()) continue;
    const double r = interval(pulled, v, v) / base;
    lo = std::min(lo, r);
    hi = std::max(hi, r);
    sum += r;
    ++count;
  }
  if (count == 0) throw Error(Errc::InvalidArgument, "no usable test vectors");
  const double mean = sum / count;
  out.phi = mean > 0.0 ? std::sqrt(mean) : 0.0;
  out.dispersion = mean > 0.0 ? (hi - lo) / mean : std::numeric_limits<double>::infinity();
  out.conformal = lo > 0.0 && out.dispersion <= 0.02;
  if (!out.conformal) {
    out.verdict = ConformalVerdict::NotConformal;
  } else if (std::abs(out.phi - 1.0) <= 1e-3) {
    out.verdict = ConformalVerdict::Isometry;
  } else {
    out.verdict = ConformalVerdict::ConformalNotIsometric;
  }
  return out;
}

namespace {

double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

double grad_norm(const Spacetime& st, const TimeFunction& tau, const Vector& x) {
  const int dim = st.dim();
  const double step = 1e-6 * st.coord_scale();
  Vector dtau(dim);
  for (int k = 0; k < dim; ++k) {
    Vector xp = x;
    Vector xm = x;
    xp[k] += step;
    xm[k] -= step;
    dtau[k] = (tau(xp) - tau(xm)) / (2.0 * step);
  }
  const Matrix g = st.metric_unchecked(x);
  return std::sqrt(std::abs(dtau.dot(g.partialPivLu().solve(dtau))));
}

}  // namespace

ConformalReport coarea_volume_compare(const Spacetime& st1, const ScalarField& phi,
                                      const TimeFunction& tau1, const Box& region, double h,
                                      double tol) {
  if (!(h > 0.0)) throw Error(Errc::InvalidArgument, "h must be positive");
  const int dim = st1.dim();
  const int n = dim - 1;
  std::array<std::int64_t, kMaxDim> cells{};
  Vector width(dim);
  std::size_t total = 1;
  double cell_volume = 1.0;
  for (int k = 0; k < dim; ++k) {
    const double span = region.hi[k] - region.lo[k];
    if (!(span > 0.0)) throw Error(Errc::InvalidArgument, "region has empty extent");
    cells[k] = std::max<std::int64_t>(1, std::llround(span / h));
    width[k] = span / static_cast<double>(cells[k]);
    cell_volume *= width[k];
    total *= static_cast<std::size_t>(cells[k]);
  }
  if (total > kMaxGridNodes) throw Error(Errc::GridTooLarge, "too many quadrature cells");

  ConformalReport report;
  report.cells = total;
  report.below_theorem_dimension = n < 2;
  std::vector<double> fn(total);
  std::vector<double> fnm1(total);
  const std::size_t stride = std::max<std::size_t>(1, total / 64);
  for (std::size_t c = 0; c < total; ++c) {
    std::size_t rem = c;
    Vector x(dim);
    for (int k = dim - 1; k >= 0; --k) {
      const auto i = rem % static_cast<std::size_t>(cells[k]);
      rem /= static_cast<std::size_t>(cells[k]);
      x[k] = region.lo[k] + (static_cast<double>(i) + 0.5) * width[k];
    }
    if (!st1.in_domain(x)) throw Error(Errc::OutOfDomain, "quadrature cell outside the domain");
    const double f = phi(x);
    if (!(f > 0.0)) throw Error(Errc::NonPositivePhi, "phi must be positive on the region");
    const double vol = std::sqrt(std::abs(st1.metric_unchecked(x).determinant())) * cell_volume;
    const double fpow = std::pow(f, n - 1);
    fnm1[c] = fpow * vol;
    fn[c] = fpow * f * vol;
    report.max_phi_dev = std::max(report.max_phi_dev, std::abs(f - 1.0));
    if (c % stride == 0) {
      report.phi_samples.push_back({Event(x), f});
      report.max_grad_tau_dev =
          std::max(report.max_grad_tau_dev, std::abs(grad_norm(st1, tau1, x) - 1.0));
    }
  }
  report.vol_n = pairwise_sum(fn.data(), fn.size());
  report.vol_nm1 = pairwise_sum(fnm1.data(), fnm1.size());
  const bool equal = std::abs(report.vol_n - report.vol_nm1) <= tol * report.vol_nm1;
  report.verdict = equal && report.max_phi_dev <= tol ? ConformalVerdict::Isometry
                                                      : ConformalVerdict::ConformalNotIsometric;
  return report;
}

RehearsalReport rigidity_rehearsal(int dim, double phi, const Box& box, double h, int n_pairs,
                                   unsigned seed) {
  const Spacetime st1 = upper_half_minkowski(dim);
  const Spacetime st2 = conformal(st1, phi);
  const auto grid1 = build_grid(st1, coordinate_time(st1), box, h, {});
  const auto grid2 = build_grid(st2, coordinate_time(st2), box, h, {});
  RehearsalReport report;
  report.coordinate_times = check_preserving(identity_map(), grid1, grid2, n_pairs, 1e-9, seed);

  const auto cosmo = time_function_from_nodes(grid2, cosmological_time_numeric(grid2),
                                              "cosmological_numeric", {true, true, false, true});
  const auto grid2c = build_grid(st2, cosmo, box, h, {});
  report.cosmological_times =
      check_preserving(identity_map(), grid1, grid2c, n_pairs, 1e-9, seed);
  report.passes = report.coordinate_times.passes && !report.cosmological_times.passes;
  return report;
}

}  // namespace nulldist
