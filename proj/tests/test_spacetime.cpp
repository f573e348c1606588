#include <gtest/gtest.h>

#include <random>

#include "nulldist/spacetime.hpp"
#include "support.hpp"

using namespace nulldist;

namespace {

std::vector<Spacetime> builtins(int dim) {
  std::vector<Spacetime> out{minkowski(dim), upper_half_minkowski(dim), missing_ray(dim),
                             warped_product(dim, 1.0, 1.0)};
  out.push_back(conformal(out[1], 2.0));
  return out;
}

Vector random_domain_point(const Spacetime& st, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_real_distribution<double> t(0.2, 3.0);
  while (true) {
    Vector x(st.dim());
    x[0] = t(rng);
    for (int k = 1; k < st.dim(); ++k) x[k] = u(rng);
    if (st.in_domain(x)) return x;
  }
}

}  // namespace

TEST(Metric, MinkowskiIsFlat) {
  const auto g = metric_eval(minkowski(4), Event{0.3, -1.0, 2.0, 5.0});
  EXPECT_EQ(g.entries, Matrix(vec({-1, 1, 1, 1}).asDiagonal()));
}

TEST(Metric, WarpedProductAtTwo) {
  const auto g = metric_eval(warped_product(4), Event{2.0, 0.1, 0.2, 0.3});
  EXPECT_EQ(g.entries, Matrix(vec({-1, 4, 4, 4}).asDiagonal()));
}

TEST(Metric, MissingRayPointIsOutOfDomain) {
  EXPECT_ERRC(metric_eval(missing_ray(4), Event{2.0, 0.0, 0.0, 0.0}), Errc::OutOfDomain);
  EXPECT_NO_THROW(metric_eval(missing_ray(4), Event{1.9, 0.0, 0.0, 0.0}));
}

TEST(Metric, ConformalScalesByPhiSquared) {
  const auto g = metric_eval(conformal(minkowski(4), 2.0), Event{0.0, 0.0, 0.0, 0.0});
  EXPECT_EQ(g.entries, Matrix(vec({-4, 4, 4, 4}).asDiagonal()));
  EXPECT_ERRC(conformal(minkowski(2), 0.0), Errc::NonPositiveConformalFactor);
}

TEST(Builtins, NamesAndDomains) {
  const auto mr = builtin("missing_ray", {4, {}, nullptr});
  EXPECT_TRUE(mr.in_domain(vec({1.0, -1.0, 0.0, 0.0})));
  EXPECT_FALSE(mr.in_domain(vec({-1.0, 0.0, 0.0, 0.0})));
  EXPECT_FALSE(mr.in_domain(vec({3.0, 0.0, 0.0, 0.0})));
  EXPECT_TRUE(mr.in_domain(vec({3.0, 1e-9, 0.0, 0.0})));
  EXPECT_ERRC(builtin("anti_de_sitter", {}), Errc::UnknownName);
  EXPECT_ERRC(builtin("conformal", {}), Errc::InvalidArgument);
}

TEST(CausalCharacter, MinkowskiExamples) {
  const Matrix g = vec({-1, 1, 1, 1}).asDiagonal();
  const Vector T = vec({1, 0, 0, 0});
  EXPECT_EQ(causal_character(g, T, vec({1, 0, 0, 0})),
            (CausalCharacter{CausalKind::Timelike, TimeSense::Future}));
  EXPECT_EQ(causal_character(g, T, vec({1, 1, 0, 0})),
            (CausalCharacter{CausalKind::Null, TimeSense::Future}));
  EXPECT_EQ(causal_character(g, T, vec({0, 1, 0, 0})),
            (CausalCharacter{CausalKind::Spacelike, TimeSense::None}));
  EXPECT_EQ(causal_character(g, T, vec({-2, 1, 0, 0})).time_sense, TimeSense::Past);
  EXPECT_ERRC(causal_character(g, T, vec({0, 0, 0, 0})), Errc::ZeroVector);
}

TEST(ReverseCauchySchwarz, Examples) {
  const MetricForm g{vec({-1, 1, 1, 1}).asDiagonal()};
  const Event o{0, 0, 0, 0};
  auto tv = [&](std::initializer_list<double> c) { return TangentVector{o, vec(c)}; };
  EXPECT_NEAR(reverse_cs_gap(g, tv({1, 0, 0, 0}), tv({1, 0, 0, 0})), 0.0, 1e-15);
  EXPECT_NEAR(reverse_cs_gap(g, tv({1, 0, 0, 0}), tv({2, 1, 0, 0})), 2.0 - std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(reverse_cs_gap(g, tv({1, 1, 0, 0}), tv({1, -1, 0, 0})), 2.0, 1e-15);
  EXPECT_ERRC(reverse_cs_gap(g, tv({0, 1, 0, 0}), tv({1, 0, 0, 0})), Errc::NotCausal);
}

TEST(Templates, IntervalAcceptsExpressions) {
  const Matrix g = vec({-1, 1}).asDiagonal();
  EXPECT_DOUBLE_EQ(interval(g, vec({1, 0}) + vec({0, 1}), 2.0 * vec({1, 0})), -2.0);
  EXPECT_DOUBLE_EQ(lorentz_norm(g, vec({2, 1})), std::sqrt(3.0));
  const Eigen::Matrix2f gf = Eigen::Vector2f(-1.0f, 1.0f).asDiagonal();
  EXPECT_FLOAT_EQ(lorentz_norm(gf, Eigen::Vector2f(0.0f, 3.0f)), 3.0f);
}

TEST(Christoffel, WarpedProductClosedForm) {
  // -dt^2 + t^2 dx^2: Gamma^t_xx = t, Gamma^x_tx = 1/t, Gamma^t_tt = 0.
  const auto st = warped_product(2);
  const auto G = christoffel(st, vec({2.0, 0.3}));
  EXPECT_NEAR(G[0](0, 0), 0.0, 1e-12);
  EXPECT_NEAR(G[0](1, 1), 2.0, 1e-12);
  EXPECT_NEAR(G[1](0, 1), 0.5, 1e-12);
  EXPECT_NEAR(G[1](1, 0), 0.5, 1e-12);
}

TEST(Christoffel, FiniteDifferencesMatchAnalyticDerivatives) {
  const auto st = warped_product(3, 0.7, 1.5);
  const Vector x = vec({1.3, 0.2, -0.4});
  const auto exact = st.metric_derivatives(x);
  const auto fd = metric_derivatives_fd(st.parts().metric, 3, x, 1e-5);
  for (int k = 0; k < 3; ++k) EXPECT_LT((exact[k] - fd[k]).cwiseAbs().maxCoeff(), 1e-8);
}

// Property: every built-in has signature (-,+,...,+) at random domain points.
TEST(Properties, LorentzSignatureEverywhere) {
  std::mt19937 rng(1);
  for (int dim : {2, 4}) {
    for (const auto& st : builtins(dim)) {
      for (int i = 0; i < 200; ++i) {
        const auto g = metric_eval(st, Event(random_domain_point(st, rng)));
        ASSERT_TRUE(g.is_symmetric());
        ASSERT_TRUE(g.has_lorentz_signature()) << st.name();
      }
    }
  }
}

// Property: the causal character does not see a conformal factor.
TEST(Properties, ConformalClassificationInvariance) {
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> phi(0.1, 10.0);
  const auto st = warped_product(3);
  for (int i = 0; i < 2000; ++i) {
    const Vector x = random_domain_point(st, rng);
    Vector v = vec({u(rng), u(rng), u(rng)});
    if (i % 4 == 0) v[0] = std::abs(x[0]) * std::hypot(v[1], v[2]);  // exactly null
    const Matrix g = st.metric_unchecked(x);
    const double f = phi(rng);
    ASSERT_EQ(causal_character(g, st.orientation(x), v),
              causal_character(Matrix(f * f * g), st.orientation(x), v));
  }
}

// Property: reverse Cauchy-Schwarz on random causal pairs.
TEST(Properties, ReverseCauchySchwarzNonNegative) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (const auto& st : builtins(4)) {
    for (int i = 0; i < 10000; ++i) {
      const Vector x = random_domain_point(st, rng);
      const MetricForm g = metric_eval(st, Event(x));
      auto causal = [&] {
        while (true) {
          const Vector v = vec({u(rng), u(rng), u(rng), u(rng)});
          if (g(v, v) <= 0.0 && v.cwiseAbs().maxCoeff() > 1e-3) return v;
        }
      };
      const double gap = reverse_cs_gap(g, {Event(x), causal()}, {Event(x), causal()});
      ASSERT_GE(gap, -1e-9) << st.name();
    }
  }
}

// Property: the orientation field never flips between nearby points.
TEST(Properties, OrientationContinuity) {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> nudge(-0.05, 0.05);
  for (const auto& st : builtins(3)) {
    for (int i = 0; i < 500; ++i) {
      const Vector p = random_domain_point(st, rng);
      const Vector q = p + vec({nudge(rng), nudge(rng), nudge(rng)});
      if (!st.in_domain(q)) continue;
      const Matrix g = st.metric_unchecked(p);
      ASSERT_LT(interval(g, st.orientation(p), st.orientation(q)), 0.0);
    }
  }
}
