#include "rasplit/resolvents.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <limits>

using namespace rasplit;
using rasplit::testing::randn;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

Vec constant(std::size_t n, double c) { return Vec::Constant(static_cast<Eigen::Index>(n), c); }

// Naive 2-D DFT on a rows x cols grid, sign -1 forward.
std::vector<std::complex<double>> naive_dft(const std::vector<std::complex<double>>& x, std::size_t rows,
                                            std::size_t cols, double sign) {
  std::vector<std::complex<double>> out(rows * cols);
  for (std::size_t a = 0; a < rows; ++a)
    for (std::size_t b = 0; b < cols; ++b) {
      std::complex<double> acc = 0.0;
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
          const double ang = sign * 2.0 * M_PI *
                             (static_cast<double>(a * r) / static_cast<double>(rows) +
                              static_cast<double>(b * c) / static_cast<double>(cols));
          acc += x[r * cols + c] * std::polar(1.0, ang);
        }
      out[a * cols + b] = acc;
    }
  return out;
}

// Projection onto {x real : DFT(x)_k = t_k e^{i theta_k}, t_k >= 0}.
Vec naive_phase_projection(const Vec& x, const Vec& theta, std::size_t rows, std::size_t cols) {
  std::vector<std::complex<double>> xc(x.begin(), x.end());
  auto spec = naive_dft(xc, rows, cols, -1.0);
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const auto ph = std::polar(1.0, theta[static_cast<Eigen::Index>(k)]);
    spec[k] = std::max(0.0, (spec[k] * std::conj(ph)).real()) * ph;
  }
  const auto back = naive_dft(spec, rows, cols, 1.0);
  Vec out(x.size());
  for (std::size_t k = 0; k < back.size(); ++k)
    out[static_cast<Eigen::Index>(k)] = back[k].real() / static_cast<double>(rows * cols);
  return out;
}

Vec naive_phase_of(const Vec& x, std::size_t rows, std::size_t cols) {
  std::vector<std::complex<double>> xc(x.begin(), x.end());
  const auto spec = naive_dft(xc, rows, cols, -1.0);
  Vec th(x.size());
  for (std::size_t k = 0; k < spec.size(); ++k) th[static_cast<Eigen::Index>(k)] = std::arg(spec[k]);
  return th;
}

std::vector<ResolventOp> every_kind(Stream& s, std::size_t n) {
  const Vec lo = randn(s, n), hi = lo.array() + s.uniform(0.0, 2.0);
  auto cone = std::make_shared<const PhaseConstraint>(GridShape{4, n / 4},
                                                      PhaseConstraint::phase_of(GridShape{4, n / 4}, randn(s, n)));
  return {ResolventOp::zero(n),
          ResolventOp::norm(n, 0.7),
          ResolventOp::dist_interval(lo, hi, 1.3),
          ResolventOp::quadratic(2.0, randn(s, n)),
          ResolventOp::hinge(-1.0, randn(s, n), 0.5),
          ResolventOp::hinge(1.0, randn(s, n)),
          ResolventOp::box(lo, hi),
          ResolventOp::hard_clip(randn(s, n, 50.0), 60.0, 2.0),
          ResolventOp::soft_clip(randn(s, n, 50.0), 90.0),
          ResolventOp::mean_constraint(3.0),
          ResolventOp::phase(cone, 1.5),
          ResolventOp::indicator_point(randn(s, n))};
}

// f for the subdifferential kinds, written out directly.
struct Objective {
  std::string name;
  ResolventOp op;
  std::function<double(const Vec&)> f;
};

std::vector<Objective> objectives(Stream& s, std::size_t n) {
  const Vec lo = randn(s, n), hi = lo.array() + 1.0, c = randn(s, n), u = randn(s, n);
  const double w_norm = 0.05, w_int = 0.8, w_hinge = 0.6;
  auto dist = [lo, hi, w_int](const Vec& x) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < x.size(); ++j) acc += std::max({0.0, lo[j] - x[j], x[j] - hi[j]});
    return w_int * acc;
  };
  auto box = [lo, hi](const Vec& x) {
    for (Eigen::Index j = 0; j < x.size(); ++j)
      if (x[j] < lo[j] || x[j] > hi[j]) return kInf;
    return 0.0;
  };
  return {{"norm", ResolventOp::norm(n, w_norm), [w_norm](const Vec& x) { return w_norm * x.norm(); }},
          {"interval", ResolventOp::dist_interval(lo, hi, w_int), dist},
          {"quadratic", ResolventOp::quadratic(1.7, c), [c](const Vec& x) { return 0.85 * (x - c).squaredNorm(); }},
          {"hinge", ResolventOp::hinge(-1.0, u, w_hinge),
           [u, w_hinge](const Vec& x) { return w_hinge * std::max(0.0, 1.0 + x.dot(u)); }},
          {"box", ResolventOp::box(lo, hi), box}};
}

}  // namespace

TEST(Resolvents, ClosedFormExamples) {
  EXPECT_EQ(ResolventOp::norm(3).resolve(1.0, Vec::Zero(3)), Vec::Zero(3));
  EXPECT_EQ(ResolventOp::box(3, 0.0, 255.0).resolve(1.0, vec({-3, 100, 300})), vec({0, 100, 255}));
  EXPECT_NEAR(ResolventOp::quadratic(1.0, vec({2})).resolve(1.0, vec({0}))[0], 1.0, 1e-15);
  EXPECT_TRUE(prox_norm(1.0, vec({0.3, 0.4})).isZero());
  EXPECT_LE((prox_norm(1.0, vec({1.2, 1.6})) - vec({0.6, 0.8})).norm(), 1e-15);
  EXPECT_NEAR(prox_dist_interval(0.5, vec({0}), vec({1}), vec({2}))[0], 1.5, 1e-15);
  EXPECT_NEAR(prox_dist_interval(0.5, vec({0}), vec({1}), vec({1.2}))[0], 1.0, 1e-15);
  EXPECT_NEAR(prox_dist_interval(0.5, vec({0}), vec({1}), vec({0.4}))[0], 0.4, 1e-15);
  EXPECT_EQ(prox_hinge(1.0, 1.0, vec({1, 1}), vec({1, 1})), vec({1, 1}));
  EXPECT_NEAR(prox_hinge(1.0, 1.0, vec({1}), vec({-2}))[0], -1.0, 1e-15);
  EXPECT_NEAR(prox_hinge(1.0, 1.0, vec({1}), vec({0.5}))[0], 1.0, 1e-15);
  EXPECT_NEAR(resolvent_hard_clip(1.0, vec({0}), 60.0, vec({30}))[0], 15.0, 1e-13);
  EXPECT_NEAR(resolvent_hard_clip(1.0, vec({0}), 60.0, vec({0}))[0], 0.0, 1e-15);
  EXPECT_EQ(resolvent_soft_clip(1.0, 90.0, vec({-5}))[0], -5.0);
  EXPECT_EQ(resolvent_soft_clip(1.0, 90.0, vec({0}))[0], 0.0);
  EXPECT_NEAR(resolvent_mean_constraint(1.0, 4.0, 0.0), 2.0, 1e-15);
  EXPECT_NEAR(resolvent_mean_constraint(0.3, 4.0, 4.0), 4.0, 1e-15);
  EXPECT_LE(std::abs(resolvent_mean_constraint(1e3, 4.0, -6.0) - 4.0), 10.0 / (1.0 + 1e3) + 1e-12);
}

TEST(Resolvents, SmallShrinkageMatchesArgminOracle) {
  Stream s(21, 1);
  for (int t = 0; t < 5; ++t) {
    const Vec x = randn(s, 4, 0.1);
    const Vec out = prox_norm(0.05, x);
    auto phi = [&](const Vec& z) { return z.norm() + (x - z).squaredNorm() / 0.1; };
    EXPECT_GE(rasplit::testing::search_min(phi, out, s, 2000) - phi(out), -1e-8);
  }
}

TEST(Resolvents, RejectNonPositiveGamma) {
  Stream s(22, 1);
  for (const auto& r : every_kind(s, 16)) {
    EXPECT_THROW(r.resolve(0.0, Vec::Zero(static_cast<Eigen::Index>(r.dim()))), InvalidArgument) << r.name();
    EXPECT_THROW(r.resolve(-1.0, Vec::Zero(static_cast<Eigen::Index>(r.dim()))), InvalidArgument) << r.name();
  }
  EXPECT_THROW(prox_hinge(1.0, 1.0, Vec::Zero(2), Vec::Zero(2)), InvalidArgument);
  EXPECT_THROW(ResolventOp::dist_interval(vec({1}), vec({0})), InvalidArgument);
}

TEST(Resolvents, FirmlyNonexpansiveEveryKind) {
  Stream s(23, 1);
  for (const auto& r : every_kind(s, 16)) {
    for (int t = 0; t < 1000; ++t) {
      const double gamma = std::exp(s.uniform(-3.0, 3.0));
      const double scale = std::pow(10.0, s.uniform(-1.0, 2.0));
      const Vec x = randn(s, r.dim(), scale), y = randn(s, r.dim(), scale);
      const Vec d = r.resolve(gamma, x) - r.resolve(gamma, y);
      ASSERT_GE(d.dot(x - y) - d.squaredNorm(), -1e-9 * std::max(1.0, (x - y).squaredNorm())) << r.name();
    }
  }
}

TEST(Resolvents, ArgminOracle) {
  Stream s(24, 1);
  for (const auto& obj : objectives(s, 4)) {
    for (int t = 0; t < 4; ++t) {
      const double gamma = std::exp(s.uniform(-2.0, 1.0));
      const Vec x = randn(s, 4, 2.0);
      const Vec out = obj.op.resolve(gamma, x);
      auto phi = [&](const Vec& z) { return obj.f(z) + (x - z).squaredNorm() / (2.0 * gamma); };
      ASSERT_TRUE(std::isfinite(phi(out))) << obj.name;
      EXPECT_GE(rasplit::testing::search_min(phi, out, s) - phi(out), -1e-8) << obj.name;
    }
  }
}

TEST(Resolvents, ValueMatchesDirectFormula) {
  Stream s(25, 1);
  for (const auto& obj : objectives(s, 5)) {
    for (int t = 0; t < 20; ++t) {
      const Vec x = obj.op.resolve(1.0, randn(s, 5, 2.0));
      ASSERT_TRUE(obj.op.value(x).has_value()) << obj.name;
      EXPECT_NEAR(*obj.op.value(x), obj.f(x), 1e-12) << obj.name;
    }
  }
}

TEST(Resolvents, HardClipEquation) {
  Stream s(26, 1);
  for (int t = 0; t < 200; ++t) {
    const double gamma = std::exp(s.uniform(-2.0, 2.0)), c = s.uniform(1.0, 100.0);
    const Vec r = randn(s, 8, 40.0), x = randn(s, 8, 80.0);
    const Vec out = resolvent_hard_clip(gamma, r, c, x);
    const Vec f = out.cwiseMax(0.0).cwiseMin(c) - r;
    ASSERT_LE((out + gamma * f - x).norm(), 1e-10 * (1.0 + x.norm()));
  }
}

TEST(Resolvents, SoftClipEquation) {
  Stream s(27, 1);
  auto F = [](double level, double t) { return level * std::max(0.0, t) / (level + std::abs(t)); };
  for (int t = 0; t < 200; ++t) {
    const double gamma = std::exp(s.uniform(-2.0, 2.0)), level = s.uniform(1.0, 200.0);
    const Vec eta = randn(s, 8, 100.0).cwiseAbs();
    const Vec out = resolvent_soft_clip(gamma, level, eta);
    for (Eigen::Index j = 0; j < eta.size(); ++j) {
      ASSERT_NEAR(out[j] + gamma * F(level, out[j]), eta[j], 1e-9 * (1.0 + eta[j]));
      ASSERT_NEAR(soft_clip(level, out[j]), F(level, out[j]), 1e-15);
    }
  }
}

TEST(Resolvents, WeightedClipOperatorsSolveTheirEquations) {
  Stream s(28, 1);
  const Vec r = randn(s, 6, 30.0), x = randn(s, 6, 80.0);
  const double w = 1.7, gamma = 0.6;
  const Vec hard = ResolventOp::hard_clip(r, 60.0, w).resolve(gamma, x);
  EXPECT_LE((hard + gamma * w * (hard.cwiseMax(0.0).cwiseMin(60.0) - r) - x).norm(), 1e-9 * x.norm());
  const Vec soft = ResolventOp::soft_clip(r, 90.0, w).resolve(gamma, x);
  Vec f(6);
  for (Eigen::Index j = 0; j < 6; ++j) f[j] = 90.0 * std::max(0.0, soft[j]) / (90.0 + std::abs(soft[j])) - r[j];
  EXPECT_LE((soft + gamma * w * f - x).norm(), 1e-9 * x.norm());
  const Vec mean = ResolventOp::mean_constraint(4.0, w).resolve(gamma, vec({-2}));
  EXPECT_NEAR(mean[0] + gamma * w * (mean[0] - 4.0), -2.0, 1e-14);
}

TEST(Phase, ProjectionMatchesNaiveDft) {
  Stream s(29, 1);
  for (GridShape g : {GridShape{4, 4}, GridShape{1, 16}, GridShape{3, 5}}) {
    const Vec theta = naive_phase_of(randn(s, g.size()), g.rows, g.cols);
    EXPECT_LE((PhaseConstraint::phase_of(g, randn(s, g.size())).cwiseAbs().maxCoeff()), M_PI + 1e-15);
    const PhaseConstraint c(g, theta);
    for (int t = 0; t < 10; ++t) {
      const Vec x = randn(s, g.size(), 10.0);
      EXPECT_LE((c.project(x) - naive_phase_projection(x, theta, g.rows, g.cols)).norm(), 1e-10 * x.norm());
    }
  }
}

TEST(Phase, ResidualAndResolventEquation) {
  Stream s(30, 1);
  const GridShape g{16, 16};
  const Vec truth = randn(s, g.size(), 5.0);
  const PhaseConstraint c(g, PhaseConstraint::phase_of(g, truth));
  EXPECT_LE(phase_residual_op(c, truth).norm(), 1e-10 * truth.norm());
  EXPECT_TRUE(phase_residual_op(c, Vec::Zero(256)).isZero());
  EXPECT_TRUE(resolvent_phase(1.0, c, Vec::Zero(256)).isZero());
  EXPECT_LE((resolvent_phase(2.0, c, truth) - truth).norm(), 1e-10 * truth.norm());
  for (int t = 0; t < 100; ++t) {
    const Vec x = randn(s, g.size(), 10.0), y = randn(s, g.size(), 10.0);
    const Vec d = phase_residual_op(c, x) - phase_residual_op(c, y);
    ASSERT_GE(d.dot(x - y) - d.squaredNorm(), -1e-9 * (x - y).squaredNorm());
  }
  for (double gamma : {0.1, 1.0, 7.0}) {
    const Vec y = randn(s, g.size(), 10.0);
    const Vec out = resolvent_phase(gamma, c, y);
    EXPECT_LE((out + gamma * phase_residual_op(c, out) - y).norm(), 1e-8 * y.norm());
  }
}

TEST(Phase, ZeroModulusBinGivesZero) {
  // Constant image: every non-DC bin has zero modulus.
  const GridShape g{4, 4};
  const PhaseConstraint c(g, Vec::Zero(16));
  const Vec x = Vec::Constant(16, 3.0);
  EXPECT_LE((c.project(x) - x).norm(), 1e-12);
  EXPECT_LE(c.project(-x).norm(), 1e-12);
}

TEST(Conjugate, NormConjugateIsBallProjection) {
  auto prox = [](double g, const Vec& x) { return prox_norm(g, x); };
  EXPECT_LE((prox_conjugate(1.0, prox, vec({0.3, -0.4})) - vec({0.3, -0.4})).norm(), 1e-15);
  EXPECT_LE((prox_conjugate(1.0, prox, vec({2, 0})) - vec({1, 0})).norm(), 1e-15);
  Stream s(31, 1);
  for (int t = 0; t < 50; ++t) {
    const double gamma = std::exp(s.uniform(-2.0, 2.0));
    const Vec y = randn(s, 3, 2.0);
    const Vec ball = y / std::max(1.0, y.norm());
    EXPECT_LE((prox_conjugate(gamma, prox, y) - ball).norm(), 1e-12);
  }
}

TEST(Conjugate, QuadraticConjugateClosedForm) {
  // f = a/2 ||x - c||^2, f*(u) = ||u||^2/(2a) + <c, u>.
  Stream s(32, 1);
  const double a = 2.5;
  const Vec c = randn(s, 3);
  const ResolventOp q = ResolventOp::quadratic(a, c);
  auto prox = [&](double g, const Vec& x) { return q.resolve(g, x); };
  for (double gamma : {0.2, 1.0, 4.0}) {
    const Vec y = randn(s, 3);
    const Vec want = (y / gamma - c) / (1.0 / a + 1.0 / gamma);
    EXPECT_LE((prox_conjugate(gamma, prox, y) - want).norm(), 1e-12);
  }
}

TEST(InverseResolvent, IdentityOperator) {
  const ResolventOp id = ResolventOp::quadratic(1.0, Vec::Zero(2));
  for (double sigma : {0.1, 1.0, 3.0}) {
    const Vec y = vec({1.5, -2});
    EXPECT_LE((inverse_resolvent(sigma, id, y) - y / (1.0 + sigma)).norm(), 1e-14);
  }
}

TEST(InverseResolvent, ConeGivesPolarProjection) {
  const ResolventOp cone = ResolventOp::box(vec({0}), vec({kInf}));
  EXPECT_NEAR(inverse_resolvent(1.0, cone, vec({-2}))[0], -2.0, 1e-15);
  EXPECT_NEAR(inverse_resolvent(1.0, cone, vec({3}))[0], 0.0, 1e-15);
}

TEST(InverseResolvent, AgreesWithConjugatePath) {
  Stream s(33, 1);
  for (const auto& obj : objectives(s, 4)) {
    auto prox = [&](double g, const Vec& x) { return obj.op.resolve(g, x); };
    for (double sigma : {0.3, 1.0, 2.0}) {
      const Vec y = randn(s, 4, 2.0);
      EXPECT_LE((inverse_resolvent(sigma, obj.op, y) - prox_conjugate(sigma, prox, y)).norm(), 1e-10) << obj.name;
    }
  }
}

TEST(InverseResolvent, MoreauDecomposition) {
  // x = J_{gA}(x) + g J_{g^{-1} A^{-1}}(x / g).
  Stream s(34, 1);
  for (const auto& r : every_kind(s, 16)) {
    for (double gamma : {0.25, 1.0, 3.0}) {
      const Vec x = randn(s, r.dim(), 3.0);
      const Vec sum = r.resolve(gamma, x) + gamma * inverse_resolvent(1.0 / gamma, r, x / gamma);
      EXPECT_LE((sum - x).norm(), 1e-9 * (1.0 + x.norm())) << r.name();
    }
  }
}

TEST(Resolvents, FixedPointsAreScaleIndependent) {
  Stream s(35, 1);
  const Vec u = randn(s, 3), c = randn(s, 3);
  const Vec lo = constant(3, -1.0), hi = constant(3, 1.0);
  struct Case {
    ResolventOp op;
    Vec zero;
    Vec nonzero;
  };
  const Vec far_side = 5.0 * u / u.squaredNorm();
  const std::vector<Case> cases{
      {ResolventOp::norm(3), Vec::Zero(3), constant(3, 1.0)},
      {ResolventOp::quadratic(2.0, c), c, c + constant(3, 1.0)},
      {ResolventOp::hinge(1.0, u), far_side, -far_side},
      {ResolventOp::box(lo, hi), constant(3, 0.5), constant(3, 0.5)},
      {ResolventOp::dist_interval(lo, hi), constant(3, 0.2), constant(3, 3.0)},
      {ResolventOp::hard_clip(constant(3, 20.0), 60.0), constant(3, 20.0), constant(3, 25.0)},
      {ResolventOp::mean_constraint(2.0), vec({2}), vec({3})}};
  for (const auto& cs : cases) {
    for (double gamma : {1e-2, 1.0, 1e2}) {
      EXPECT_LE((cs.op.resolve(gamma, cs.zero) - cs.zero).norm(), 1e-12 * (1.0 + cs.zero.norm())) << cs.op.name();
      if (cs.op.kind() != ResolventOp::Kind::ProjBox) {
        EXPECT_GT((cs.op.resolve(gamma, cs.nonzero) - cs.nonzero).norm(), 1e-6) << cs.op.name();
      }
    }
  }
}

TEST(Resolvents, IntrospectionFlags) {
  EXPECT_TRUE(ResolventOp::hinge(1.0, vec({1})).real_valued());
  EXPECT_FALSE(ResolventOp::box(1, 0.0, 1.0).real_valued());
  EXPECT_TRUE(ResolventOp::norm(2).nonnegative());
  const auto qp = ResolventOp::quadratic(3.0, vec({1, 2})).quadratic_params();
  ASSERT_TRUE(qp.has_value());
  EXPECT_EQ(qp->first, 3.0);
  EXPECT_FALSE(ResolventOp::norm(2).quadratic_params().has_value());
  EXPECT_FALSE(ResolventOp::phase(std::make_shared<const PhaseConstraint>(GridShape{1, 4}, Vec::Zero(4)))
                   .is_subdifferential());
}
