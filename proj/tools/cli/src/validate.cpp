#include "rasplit/cli/commands.hpp"

#include <functional>
#include <iostream>
#include <sstream>

namespace rasplit::cli {

namespace {

Vec randn(Stream& s, std::size_t n) {
  Vec v(static_cast<Eigen::Index>(n));
  for (auto& x : v) x = s.normal();
  return v;
}

struct Suite {
  std::ostream& out;
  int failures = 0;

  void check(const std::string& name, const std::function<std::string()>& body) {
    std::string detail;
    bool ok;
    try {
      detail = body();
      ok = detail.empty();
    } catch (const std::exception& e) {
      ok = false;
      detail = e.what();
    }
    out << (ok ? "PASS " : "FAIL ") << name;
    if (!ok) out << ": " << detail;
    out << '\n';
    if (!ok) ++failures;
  }
};

std::vector<LinearOp> sample_ops(Stream& s) {
  const std::size_t n = 16;
  RowMajorMat m(5, n);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = s.normal();
  auto parent = std::make_shared<const RowMajorMat>(m);
  return {LinearOp::dense(m),
          LinearOp::circulant(randn(s, n), GridShape{4, 4}),
          LinearOp::row_block(parent, 1, 3),
          LinearOp::select({0, 3, 7, 15}, n),
          LinearOp::inner_product(randn(s, n)),
          LinearOp::identity(n),
          LinearOp::scaled(LinearOp::circulant(randn(s, n)), -1.5)};
}

std::vector<ResolventOp> sample_resolvents(Stream& s, std::size_t n) {
  Vec lo = randn(s, n), hi = lo.array() + 1.0;
  auto cone = std::make_shared<const PhaseConstraint>(GridShape{4, 4},
                                                      PhaseConstraint::phase_of(GridShape{4, 4}, randn(s, 16)));
  return {ResolventOp::zero(n),
          ResolventOp::norm(n, 0.7),
          ResolventOp::dist_interval(lo, hi, 1.3),
          ResolventOp::quadratic(2.0, randn(s, n)),
          ResolventOp::hinge(-1.0, randn(s, n), 0.5),
          ResolventOp::box(lo, hi),
          ResolventOp::hard_clip(randn(s, n), 1.5),
          ResolventOp::soft_clip(randn(s, n), 2.0),
          ResolventOp::mean_constraint(3.0),
          ResolventOp::phase(cone),
          ResolventOp::indicator_point(randn(s, n))};
}

}  // namespace

int validate_invariants(std::ostream& out, std::uint64_t seed) {
  Suite suite{out};
  Stream s(seed, 0x7A1);

  for (const auto& op : sample_ops(s)) {
    suite.check("adjoint " + op.describe(), [&] {
      for (int t = 0; t < 50; ++t) {
        const Vec x = randn(s, op.in_dim()), y = randn(s, op.out_dim());
        const double lhs = op.apply(x).dot(y), rhs = x.dot(op.adjoint_apply(y));
        if (std::abs(lhs - rhs) > 1e-12 * (x.norm() * y.norm() + 1.0)) return std::string("inner products differ");
      }
      return std::string();
    });
  }

  {
    const std::size_t n = 16;
    const std::vector<std::pair<std::string, std::vector<LinearOp>>> sets{
        {"scaled-identity", {LinearOp::identity(n), LinearOp::identity(n)}},
        {"spectral", {LinearOp::circulant(randn(s, n), GridShape{4, 4}), LinearOp::circulant(randn(s, n), GridShape{4, 4})}},
        {"cholesky", {LinearOp::select({1, 2, 9}, n), LinearOp::dense(RowMajorMat(randn(s, 4 * n).reshaped<Eigen::RowMajor>(4, n)))}}};
    for (const auto& [name, ops] : sets) {
      for (double shift : {1.0, 2.0}) {
        suite.check("gram exactness " + name + " shift " + format_double(shift), [&] {
          const GramSolver g = GramSolver::build(shift, ops);
          for (int t = 0; t < 20; ++t) {
            const Vec x = randn(s, n);
            const Vec res = GramSolver::apply_gram(shift, ops, g.solve(x)) - x;
            if (res.norm() > 1e-10 * x.norm()) return "residual " + format_double(res.norm() / x.norm());
          }
          return std::string();
        });
      }
    }
  }

  for (const auto& r : sample_resolvents(s, 16)) {
    suite.check("firm nonexpansiveness " + r.name(), [&] {
      for (int t = 0; t < 100; ++t) {
        const double gamma = std::exp(s.uniform(-2.0, 2.0));
        const Vec x = 3.0 * randn(s, r.dim()), y = 3.0 * randn(s, r.dim());
        const Vec d = r.resolve(gamma, x) - r.resolve(gamma, y);
        if (d.dot(x - y) < d.squaredNorm() - 1e-9) return std::string("inequality violated");
      }
      return std::string();
    });
  }

  suite.check("activation masks nonzero with exact size", [&] {
    ActivationSchedule sch(7, 3, seed);
    for (int t = 0; t < 1000; ++t) {
      const Mask m = sch.sample();
      std::size_t c = 0;
      for (auto v : m) c += v;
      if (c != 3) return std::string("mask with ") + std::to_string(c) + " ones";
    }
    return std::string();
  });

  const HingeSVM hinge = build_hinge_svm(6, 4, seed);
  for (Framework f : {Framework::F1, Framework::F2, Framework::F3Ex11, Framework::F3Ex12, Framework::F3Ex13}) {
    suite.check("gating " + to_string(f), [&] {
      Engine e(hinge.problem, f, EngineParams{});
      EngineState st = e.initial_state();
      ActivationSchedule sch(e.index_count(), 1, seed);
      for (int t = 0; t < 200; ++t) {
        const EngineState before = st;
        const Mask m = sch.sample();
        e.step(st, m);
        // Coarse: some component must survive a one-index mask. The unit
        // tests check exact ownership.
        std::size_t unchanged = 0;
        for (auto fam : {&EngineState::x, &EngineState::z, &EngineState::y, &EngineState::w, &EngineState::u,
                         &EngineState::v})
          for (std::size_t i = 0; i < (st.*fam).size(); ++i) unchanged += (st.*fam)[i] == (before.*fam)[i];
        if (e.index_count() > 1 && unchanged == 0) return std::string("every component changed under a partial mask");
      }
      return std::string();
    });
  }

  suite.check("same seed gives identical traces", [&] {
    RunOptions o;
    o.block_size = 2;
    o.seed = seed;
    StopRule st;
    st.max_iter = 200;
    const auto a = run(hinge.problem, o, st), b = run(hinge.problem, o, st);
    if (a.x != b.x) return std::string("final iterates differ");
    for (std::size_t i = 0; i < a.trace.size(); ++i)
      if (a.trace[i].activated != b.trace[i].activated) return std::string("activation sequences differ");
    return std::string();
  });

  out << (suite.failures == 0 ? "all checks passed" : std::to_string(suite.failures) + " check(s) failed") << '\n';
  return suite.failures;
}

}  // namespace rasplit::cli
