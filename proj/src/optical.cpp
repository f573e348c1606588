#include "nulldist/optical.hpp"

#include <Eigen/LU>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <random>

namespace nulldist {

namespace {

Vector geodesic_accel(const Spacetime& st, const Vector& x, const Vector& u) {
  const auto gamma = christoffel(st, x);
  Vector a(st.dim());
  for (int i = 0; i < st.dim(); ++i) a[i] = -u.dot(gamma[i] * u);
  return a;
}

double null_defect(const Spacetime& st, const Vector& x, const Vector& u) {
  return std::abs(interval(st.metric_unchecked(x), u, u));
}

}  // namespace

GeodesicState geodesic_flow(const Spacetime& st, const Vector& x0, const Vector& u0, double s,
                            double step) {
  if (!(step > 0.0)) throw Error(Errc::InvalidArgument, "geodesic step must be positive");
  GeodesicState y{x0, u0};
  if (s == 0.0 || u0.cwiseAbs().maxCoeff() == 0.0) return y;
  const double speed2 = u0.squaredNorm();
  const bool null_data = null_defect(st, x0, u0) <= kNullTol * speed2;
  const int n = std::max(1, static_cast<int>(std::ceil(std::abs(s) / step - 1e-12)));
  const double ds = s / n;
  for (int i = 0; i < n; ++i) {
    const Vector k1x = y.u;
    const Vector k1u = geodesic_accel(st, y.x, y.u);
    const Vector x2 = y.x + 0.5 * ds * k1x;
    const Vector u2 = y.u + 0.5 * ds * k1u;
    const Vector k2u = geodesic_accel(st, x2, u2);
    const Vector x3 = y.x + 0.5 * ds * u2;
    const Vector u3 = y.u + 0.5 * ds * k2u;
    const Vector k3u = geodesic_accel(st, x3, u3);
    const Vector x4 = y.x + ds * u3;
    const Vector u4 = y.u + ds * k3u;
    const Vector k4u = geodesic_accel(st, x4, u4);
    y.x += (ds / 6.0) * (k1x + 2.0 * u2 + 2.0 * u3 + u4);
    y.u += (ds / 6.0) * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
    if (!st.in_domain(y.x)) {
      throw Error(Errc::LeftDomain, "geodesic left the domain at s = " +
                                        std::to_string((i + 1) * ds));
    }
    if (null_data && null_defect(st, y.x, y.u) > 1e-6 * y.u.squaredNorm()) {
      throw Error(Errc::StepTooLarge, "null constraint drifted at s = " +
                                          std::to_string((i + 1) * ds));
    }
  }
  return y;
}

Event geodesic_shoot(const Spacetime& st, const Event& p, const TangentVector& v, double s,
                     double step) {
  return Event(geodesic_flow(st, p.coords, v.components, s, step).x, p.chart_id);
}

namespace {

// Geodesic plus parallel frame; RK4 on the combined system.
NullChart::Sample transport(const Spacetime& st, NullChart::Sample y, double s, double step) {
  const int n = std::max(1, static_cast<int>(std::ceil(std::abs(s) / step - 1e-12)));
  const double ds = s / n;
  const int dim = st.dim();
  auto rhs = [&](const NullChart::Sample& z, Vector& dx, Vector& du, Matrix& dE) {
    const auto gamma = christoffel(st, z.x);
    dx = z.u;
    du.resize(dim);
    dE.resize(dim, z.frame.cols());
    for (int a = 0; a < dim; ++a) {
      const Vector gu = gamma[a] * z.u;
      du[a] = -z.u.dot(gu);
      dE.row(a) = -(gu.transpose() * z.frame);
    }
  };
  for (int i = 0; i < n; ++i) {
    Vector dx1, du1, dx2, du2, dx3, du3, dx4, du4;
    Matrix dE1, dE2, dE3, dE4;
    rhs(y, dx1, du1, dE1);
    NullChart::Sample z{y.x + 0.5 * ds * dx1, y.u + 0.5 * ds * du1, y.frame + 0.5 * ds * dE1};
    rhs(z, dx2, du2, dE2);
    z = {y.x + 0.5 * ds * dx2, y.u + 0.5 * ds * du2, y.frame + 0.5 * ds * dE2};
    rhs(z, dx3, du3, dE3);
    z = {y.x + ds * dx3, y.u + ds * du3, y.frame + ds * dE3};
    rhs(z, dx4, du4, dE4);
    y.x += (ds / 6.0) * (dx1 + 2.0 * dx2 + 2.0 * dx3 + dx4);
    y.u += (ds / 6.0) * (du1 + 2.0 * du2 + 2.0 * du3 + du4);
    y.frame += (ds / 6.0) * (dE1 + 2.0 * dE2 + 2.0 * dE3 + dE4);
    if (!st.in_domain(y.x)) {
      throw Error(Errc::LeftDomain, "chart axis left the domain");
    }
  }
  return y;
}

double orthonormality_defect(const Spacetime& st, const NullChart::Sample& s) {
  const Matrix g = st.metric_unchecked(s.x);
  const int n = static_cast<int>(s.frame.cols());
  Matrix basis(st.dim(), n + 1);
  basis.col(0) = s.u;
  basis.rightCols(n) = s.frame;
  Matrix gram = basis.transpose() * g * basis;
  gram(0, 0) += 1.0;
  gram.diagonal().tail(n).array() -= 1.0;
  return gram.cwiseAbs().maxCoeff();
}

}  // namespace

NullChart::Sample NullChart::eta_at(double t) const {
  const double fk = std::round((t + eps_) / dt_);
  const auto last = static_cast<double>(samples_.size() - 1);
  const auto k = static_cast<std::size_t>(std::clamp(fk, 0.0, last));
  const double tk = -eps_ + static_cast<double>(k) * dt_;
  if (t == tk) return samples_[k];
  return transport(st_, samples_[k], t - tk, dt_);
}

NullChart build_chart(const Spacetime& st, const Vector& p, TimeSense sense, double eps,
                      int n_frame) {
  if (sense == TimeSense::None) throw Error(Errc::InvalidArgument, "chart needs a time sense");
  if (!(eps > 0.0) || n_frame < 1) throw Error(Errc::InvalidArgument, "bad chart extent");
  if (!st.in_domain(p)) throw Error(Errc::OutOfDomain, "chart base outside the domain");
  NullChart chart(st);
  chart.p_ = p;
  chart.sense_ = sense;
  chart.eps_ = eps;
  chart.dt_ = eps / n_frame;
  chart.shoot_step_ = 1.0 / 16.0;

  // Orthonormal frame at p: e0 from the time orientation, spatial vectors by
  // Gram-Schmidt on the coordinate axes.
  const int dim = st.dim();
  const Matrix g = st.metric_unchecked(p);
  Vector e0 = st.orientation(p);
  e0 /= lorentz_norm(g, e0);
  Matrix frame(dim, dim - 1);
  int filled = 0;
  for (int axis = 0; axis < dim && filled < dim - 1; ++axis) {
    Vector v = Vector::Zero(dim);
    v[axis] = 1.0;
    v += interval(g, v, e0) * e0;
    for (int j = 0; j < filled; ++j) v -= interval(g, v, frame.col(j)) * frame.col(j);
    const double n2 = interval(g, v, v);
    if (n2 < 1e-8) continue;
    frame.col(filled++) = v / std::sqrt(n2);
  }
  NullChart::Sample origin{p, sense == TimeSense::Future ? e0 : Vector(-e0), frame};

  const std::size_t total = 2 * static_cast<std::size_t>(n_frame) + 1;
  chart.samples_.resize(total);
  chart.samples_[static_cast<std::size_t>(n_frame)] = origin;
  for (int k = 1; k <= n_frame; ++k) {
    const auto up = static_cast<std::size_t>(n_frame + k);
    const auto down = static_cast<std::size_t>(n_frame - k);
    chart.samples_[up] = transport(st, chart.samples_[up - 1], chart.dt_, chart.dt_);
    chart.samples_[down] = transport(st, chart.samples_[down + 1], -chart.dt_, chart.dt_);
  }
  for (const auto& s : chart.samples_) {
    chart.frame_drift_ = std::max(chart.frame_drift_, orthonormality_defect(st, s));
  }

  // Largest radius (eps, eps/2, ...) on which the forward/inverse round trip
  // closes.
  chart.domain_radius_ = 0.0;
  for (double r = eps; r > eps / 64.0; r *= 0.5) {
    bool ok = true;
    for (double t : {-0.5 * r, 0.0, 0.5 * r}) {
      for (int i = 0; i < dim - 1 && ok; ++i) {
        for (double sign : {-1.0, 1.0}) {
          Vector x = Vector::Zero(dim - 1);
          x[i] = 0.5 * r * sign;
          try {
            const Vector q = chart_forward(chart, t, x);
            const auto back = chart_inverse(chart, q, 1e-11);
            Vector z(dim);
            z[0] = t;
            z.tail(dim - 1) = x;
            if ((back.chart_coords() - z).norm() > 1e-8) ok = false;
          } catch (const Error&) {
            ok = false;
          }
        }
      }
    }
    if (ok) {
      chart.domain_radius_ = r;
      break;
    }
  }
  return chart;
}

Vector chart_forward(const NullChart& chart, double t, const Vector& x) {
  if (x.size() != chart.spatial_dim()) {
    throw Error(Errc::InvalidArgument, "chart point has the wrong dimension");
  }
  const auto axis = chart.eta_at(t);
  const Vector v = axis.frame * x + x.norm() * axis.u;
  return geodesic_flow(chart.spacetime(), axis.x, v, 1.0, chart.shoot_step()).x;
}

Vector OpticalValue::chart_coords() const {
  const Eigen::Index n = direction ? direction->size() : 0;
  Vector z(n + 1);
  z[0] = omega;
  if (direction) z.tail(n) = lambda * *direction;
  return z;
}

namespace {

struct NewtonResult {
  Vector z;
  double residual = std::numeric_limits<double>::infinity();
};

Vector forward_z(const NullChart& chart, const Vector& z) {
  return chart_forward(chart, z[0], z.tail(z.size() - 1));
}

NewtonResult newton(const NullChart& chart, const Vector& q, Vector z, double tol) {
  const int dim = static_cast<int>(z.size());
  NewtonResult best{z, std::numeric_limits<double>::infinity()};
  Vector f;
  try {
    f = forward_z(chart, z) - q;
  } catch (const Error&) {
    return best;
  }
  double res = f.norm();
  best = {z, res};
  const double fd = 1e-7 * std::max(1.0, chart.eps());
  for (int iter = 0; iter < 60 && res > tol; ++iter) {
    Matrix jac(dim, dim);
    try {
      for (int k = 0; k < dim; ++k) {
        Vector zp = z;
        Vector zm = z;
        zp[k] += fd;
        zm[k] -= fd;
        jac.col(k) = (forward_z(chart, zp) - forward_z(chart, zm)) / (2.0 * fd);
      }
    } catch (const Error&) {
      break;
    }
    const Vector dz = jac.colPivHouseholderQr().solve(-f);
    double alpha = 1.0;
    bool improved = false;
    for (int ls = 0; ls < 30; ++ls) {
      const Vector trial = z + alpha * dz;
      try {
        const Vector ft = forward_z(chart, trial) - q;
        if (ft.norm() < res) {
          z = trial;
          f = ft;
          res = ft.norm();
          improved = true;
          break;
        }
      } catch (const Error&) {
      }
      alpha *= 0.5;
    }
    if (!improved) break;
    best = {z, res};
  }
  return best;
}

OpticalValue make_value(const Vector& z, double residual) {
  OpticalValue v;
  v.omega = z[0];
  const Vector x = z.tail(z.size() - 1);
  v.lambda = x.norm();
  v.residual = residual;
  if (v.lambda <= 1e-9) {
    v.on_axis = true;
    v.lambda = 0.0;
  } else {
    v.direction = x / v.lambda;
  }
  return v;
}

}  // namespace

OpticalValue chart_inverse(const NullChart& chart, const Vector& q, double tol) {
  const auto& st = chart.spacetime();
  const int dim = st.dim();
  const int n = dim - 1;
  const double accept = tol * std::max(1.0, q.norm());

  // Flat seed: decompose q - p in the frame at p.
  const auto origin = chart.eta_at(0.0);
  const Matrix g = st.metric_unchecked(origin.x);
  const Vector d = q - origin.x;
  Vector seed(dim);
  for (int i = 0; i < n; ++i) seed[i + 1] = d.dot(g * origin.frame.col(i));
  const double along = -d.dot(g * origin.u);
  seed[0] = along - seed.tail(n).norm();

  auto result = newton(chart, q, seed, accept);
  if (result.residual <= accept) return make_value(result.z, result.residual);

  // On-axis query: project onto eta.
  {
    double t = along;
    for (int it = 0; it < 50; ++it) {
      const auto a = chart.eta_at(t);
      const double step = (q - a.x).dot(a.u) / a.u.squaredNorm();
      t += step;
      if (std::abs(step) < 1e-15) break;
    }
    const auto a = chart.eta_at(t);
    if ((a.x - q).norm() <= accept) {
      OpticalValue v;
      v.omega = t;
      v.on_axis = true;
      v.residual = (a.x - q).norm();
      return v;
    }
  }

  // Coarse (t, lambda, direction) seeds ranked by residual.
  const double r = std::max(chart.domain_radius(), chart.eps());
  std::vector<Vector> dirs;
  for (int i = 0; i < n; ++i) {
    for (double s : {-1.0, 1.0}) {
      Vector e = Vector::Zero(n);
      e[i] = s;
      dirs.push_back(e);
    }
  }
  if (n >= 2) {
    for (int mask = 0; mask < (1 << n); ++mask) {
      Vector e(n);
      for (int i = 0; i < n; ++i) e[i] = (mask >> i) & 1 ? 1.0 : -1.0;
      dirs.push_back(e.normalized());
    }
  }
  std::vector<std::pair<double, Vector>> seeds;
  const int res = 8;
  for (int it = 0; it < res; ++it) {
    const double t = -r + 2.0 * r * it / (res - 1);
    for (int il = 0; il < res; ++il) {
      const double lam = r * il / (res - 1);
      for (const auto& e : dirs) {
        Vector z(dim);
        z[0] = t;
        z.tail(n) = lam * e;
        try {
          seeds.emplace_back((forward_z(chart, z) - q).norm(), z);
        } catch (const Error&) {
        }
        if (il == 0) break;
      }
    }
  }
  std::stable_sort(seeds.begin(), seeds.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 0; i < std::min<std::size_t>(8, seeds.size()); ++i) {
    auto trial = newton(chart, q, seeds[i].second, accept);
    if (trial.residual < result.residual) result = trial;
    if (result.residual <= accept) return make_value(result.z, result.residual);
  }
  throw Error(Errc::NoConvergence,
              "chart inversion residual " + std::to_string(result.residual));
}

MonotonicityReport omega_monotonicity_check(const NullChart& chart, const CausalGrid& grid,
                                            int n_samples, unsigned seed, double delta) {
  MonotonicityReport report;
  const NodeId base = grid.require_node(chart.base());
  const auto future_of_base = reach(grid, base, TimeSense::Future);
  const double radius = 0.9 * chart.domain_radius();
  std::vector<NodeId> inside;
  for (std::size_t u = 0; u < grid.node_count(); ++u) {
    if ((grid.coords(static_cast<NodeId>(u)) - chart.base()).norm() <= radius) {
      inside.push_back(static_cast<NodeId>(u));
    }
  }
  if (inside.size() < 2) return report;
  std::vector<bool> in_chart(grid.node_count(), false);
  for (NodeId u : inside) in_chart[static_cast<std::size_t>(u)] = true;

  std::mt19937 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, inside.size() - 1);
  for (int s = 0; s < n_samples; ++s) {
    const NodeId q = inside[pick(rng)];
    const double wq = chart_inverse(chart, grid.coords(q)).omega;
    if (wq >= delta) {
      ++report.sign_samples;
      if (!future_of_base.contains(q)) ++report.sign_failures;
    }
    const auto fut = reach(grid, q, TimeSense::Future);
    std::vector<NodeId> later;
    for (NodeId v : inside) {
      if (v != q && fut.contains(v)) later.push_back(v);
    }
    if (later.empty()) continue;
    std::uniform_int_distribution<std::size_t> pick_later(0, later.size() - 1);
    for (int k = 0; k < 4; ++k) {
      const NodeId v = later[pick_later(rng)];
      const double wv = chart_inverse(chart, grid.coords(v)).omega;
      ++report.causal_pairs;
      const double drop = wq - wv;
      report.worst_drop = std::max(report.worst_drop, drop);
      if (drop > 1e-6) ++report.violations;
    }
  }
  return report;
}

namespace {

Vector x_from_value(const NullChart& chart, const OpticalValue& v) {
  if (v.on_axis) return chart.eta_at(v.omega).u;
  const double fd = 1e-4 * chart.eps();
  const Vector x = v.lambda * *v.direction;
  return (chart_forward(chart, v.omega + fd, x) - chart_forward(chart, v.omega - fd, x)) /
         (2.0 * fd);
}

Matrix g_R_from(const Matrix& g, const Vector& X) {
  const Vector gx = g * X;
  const double gxx = std::abs(X.dot(gx));
  return (2.0 / gxx) * gx * gx.transpose() + g;
}

}  // namespace

Vector optical_X(const NullChart& chart, const Vector& q) {
  return x_from_value(chart, chart_inverse(chart, q));
}

MetricForm g_R_eval(const NullChart& chart, const Vector& q) {
  const Vector X = optical_X(chart, q);
  return MetricForm{g_R_from(chart.spacetime().metric_unchecked(q), X)};
}

double grad_norm_formula(const NullChart& chart, const Vector& q) {
  const Vector X = optical_X(chart, q);
  const double gxx = std::abs(X.dot(chart.spacetime().metric_unchecked(q) * X));
  return std::sqrt(2.0 / gxx);
}

double grad_norm_omega(const NullChart& chart, const Vector& q) {
  const auto value = chart_inverse(chart, q);
  const double scale = chart.spacetime().coord_scale();
  if (value.on_axis || value.lambda < 1e-6 * scale) {
    throw Error(Errc::OnAxisDegenerate, "omega is not differentiable on the chart axis");
  }
  const int dim = static_cast<int>(q.size());
  const double fd = 1e-5 * scale;
  Vector domega(dim);
  for (int k = 0; k < dim; ++k) {
    Vector qp = q;
    Vector qm = q;
    qp[k] += fd;
    qm[k] -= fd;
    domega[k] = (chart_inverse(chart, qp).omega - chart_inverse(chart, qm).omega) / (2.0 * fd);
  }
  const Matrix gR =
      g_R_from(chart.spacetime().metric_unchecked(q), x_from_value(chart, value));
  return std::sqrt(domega.dot(gR.partialPivLu().solve(domega)));
}

LipschitzReport lipschitz_estimate(const NullChart& chart, const LipschitzOptions& options) {
  const auto& st = chart.spacetime();
  const int dim = st.dim();
  const int m = std::max(3, options.points_per_axis | 1);
  const double w = options.half_width > 0.0 ? options.half_width : 0.5 * chart.domain_radius();
  if (!(w > 0.0)) throw Error(Errc::InvalidArgument, "empty Lipschitz sampling region");
  const double spacing = 2.0 * w / (m - 1);

  std::size_t total = 1;
  for (int k = 0; k < dim; ++k) total *= static_cast<std::size_t>(m);
  std::vector<Vector> pos(total);
  std::vector<double> omega(total);
  std::vector<Matrix> gR(total);
  for (std::size_t s = 0; s < total; ++s) {
    std::size_t rem = s;
    Vector x(dim);
    for (int k = dim - 1; k >= 0; --k) {
      x[k] = chart.base()[k] - w + spacing * static_cast<double>(rem % m);
      rem /= m;
    }
    const auto v = chart_inverse(chart, x);
    pos[s] = x;
    omega[s] = v.omega;
    gR[s] = g_R_from(st.metric_unchecked(x), x_from_value(chart, v));
  }

  StencilSpec stencil{2, true};
  const auto offsets = stencil_offsets(dim, stencil);
  auto neighbor = [&](std::size_t s, const LatticeOffset& o) -> std::ptrdiff_t {
    std::size_t rem = s;
    std::array<long, kMaxDim> idx{};
    for (int k = dim - 1; k >= 0; --k) {
      idx[k] = static_cast<long>(rem % m);
      rem /= m;
    }
    std::ptrdiff_t out = 0;
    for (int k = 0; k < dim; ++k) {
      const long j = idx[k] + o[k];
      if (j < 0 || j >= m) return -1;
      out = out * m + j;
    }
    return out;
  };
  auto dijkstra = [&](std::size_t src) {
    std::vector<double> dist(total, std::numeric_limits<double>::infinity());
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[src] = 0.0;
    heap.emplace(0.0, src);
    while (!heap.empty()) {
      const auto [d, u] = heap.top();
      heap.pop();
      if (d > dist[u]) continue;
      for (const auto& o : offsets) {
        const auto v = neighbor(u, o);
        if (v < 0) continue;
        const auto vi = static_cast<std::size_t>(v);
        const Vector delta = pos[vi] - pos[u];
        const Matrix avg = 0.5 * (gR[u] + gR[vi]);
        const double nd = d + std::sqrt(delta.dot(avg * delta));
        if (nd < dist[vi]) {
          dist[vi] = nd;
          heap.emplace(nd, vi);
        }
      }
    }
    return dist;
  };

  LipschitzReport report;
  report.lattice_nodes = total;
  std::mt19937 rng(options.seed);
  std::uniform_int_distribution<std::size_t> pick(0, total - 1);
  const int sources = std::max(1, std::min(options.n_pairs, 40));
  const int per_source = (options.n_pairs + sources - 1) / sources;
  for (int s = 0; s < sources; ++s) {
    const std::size_t src = pick(rng);
    const auto dist = dijkstra(src);
    for (int k = 0; k < per_source; ++k) {
      std::size_t dst = pick(rng);
      if (dst == src) dst = (dst + 1) % total;
      const double ratio = std::abs(omega[src] - omega[dst]) / dist[dst];
      report.max_ratio = std::max(report.max_ratio, ratio);
      ++report.pairs;
    }
  }
  return report;
}

}  // namespace nulldist
