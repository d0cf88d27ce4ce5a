// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include "rasplit/algorithms.hpp"
#include "rasplit/cli/commands.hpp"
#include "rasplit/problems.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

using namespace rasplit;
namespace fs = std::filesystem;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr Framework kFrameworks[] = {Framework::F1, Framework::F2, Framework::F3Ex11, Framework::F3Ex12,
                                     Framework::F3Ex13};

struct Outcome {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      if (!ok) detail << "; ";
      detail << what;
      ok = false;
    }
  }
};

Vec randn(Stream& s, std::size_t n, double scale = 1.0) {
  Vec v(static_cast<Eigen::Index>(n));
  for (auto& x : v) x = scale * s.normal();
  return v;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Random search around `start` followed by coordinate polishing.
double search_min(const std::function<double(const Vec&)>& phi, const Vec& start, Stream& s) {
  Vec best = start;
  double fbest = phi(best);
  for (int t = 0; t < 10000; ++t) {
    const Vec c = start + std::pow(10.0, s.uniform(-6.0, 1.0)) * randn(s, static_cast<std::size_t>(start.size()));
    const double fc = phi(c);
    if (fc < fbest) {
      fbest = fc;
      best = c;
    }
  }
  for (double h = 1.0; h > 1e-10; h *= 0.5) {
    for (bool moved = true; moved;) {
      moved = false;
      for (Eigen::Index i = 0; i < best.size(); ++i) {
        for (double sgn : {1.0, -1.0}) {
          Vec c = best;
          c[i] += sgn * h;
          const double fc = phi(c);
          if (fc < fbest) {
            fbest = fc;
            best = c;
            moved = true;
          }
        }
      }
    }
  }
  return fbest;
}

// ---------------------------------------------------------------------------

Outcome resolvent_suite() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  Stream s(101, 1);
  const std::size_t n = 16;
  const Vec lo = randn(s, n), hi = lo.array() + 1.5, c = randn(s, n), u = randn(s, n), pt = randn(s, n);
  const GridShape g{4, 4};
  auto cone = std::make_shared<const PhaseConstraint>(g, PhaseConstraint::phase_of(g, randn(s, n)));

  // Subdifferential kinds carry an independently written f; the rest are
  // single-valued and checked through x = r + gamma B(r).
  struct Case {
    ResolventOp op;
    std::function<double(const Vec&)> f;
  };
  auto interval = [lo, hi](const Vec& x) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < x.size(); ++j) acc += std::max({0.0, lo[j] - x[j], x[j] - hi[j]});
    return 1.3 * acc;
  };
  auto box = [lo, hi](const Vec& x) {
    for (Eigen::Index j = 0; j < x.size(); ++j)
      if (x[j] < lo[j] || x[j] > hi[j]) return kInf;
    return 0.0;
  };
  auto point = [pt](const Vec& x) { return (x.array() == pt.array()).all() ? 0.0 : kInf; };
  const std::vector<Case> cases{
      {ResolventOp::zero(n), [](const Vec&) { return 0.0; }},
      {ResolventOp::norm(n, 0.7), [](const Vec& x) { return 0.7 * x.norm(); }},
      {ResolventOp::dist_interval(lo, hi, 1.3), interval},
      {ResolventOp::quadratic(2.0, c), [c](const Vec& x) { return (x - c).squaredNorm(); }},
      {ResolventOp::hinge(-1.0, u, 0.5), [u](const Vec& x) { return 0.5 * std::max(0.0, 1.0 + x.dot(u)); }},
      {ResolventOp::box(lo, hi), box},
      {ResolventOp::indicator_point(pt), point},
      {ResolventOp::hard_clip(randn(s, n, 50.0), 60.0, 2.0), nullptr},
      {ResolventOp::soft_clip(randn(s, n, 50.0), 90.0), nullptr},
      {ResolventOp::mean_constraint(3.0), nullptr},
      {ResolventOp::phase(cone, 1.5), nullptr},
  };

  double worst_fne = 0.0, worst_margin = 0.0, worst_eq = 0.0;
  for (const Case& k : cases) {
    const std::size_t d = k.op.dim() == 0 ? n : k.op.dim();
    for (int t = 0; t < 1000; ++t) {
      const double gamma = std::exp(s.uniform(-3.0, 3.0));
      const double scale = std::pow(10.0, s.uniform(-1.0, 2.0));
      const Vec x = randn(s, d, scale), y = randn(s, d, scale);
      const Vec r = k.op.resolve(gamma, x) - k.op.resolve(gamma, y);
      const double viol = -(r.dot(x - y) - r.squaredNorm()) / std::max(1.0, (x - y).squaredNorm());
      worst_fne = std::max(worst_fne, viol);
    }
    for (int t = 0; t < 5; ++t) {
      const double gamma = std::exp(s.uniform(-2.0, 1.0));
      const Vec x = randn(s, d, k.f ? 2.0 : 40.0);
      const Vec r = k.op.resolve(gamma, x);
      if (k.f) {
        auto phi = [&](const Vec& z) { return k.f(z) + (x - z).squaredNorm() / (2.0 * gamma); };
        worst_margin = std::min(worst_margin, search_min(phi, r, s) - phi(r));
      } else {
        const auto b = k.op.evaluate(r);
        o.require(b.has_value(), k.op.name() + " has no evaluation");
        if (b) worst_eq = std::max(worst_eq, (r + gamma * *b - x).norm() / std::max(1.0, x.norm()));
      }
    }
  }
  const double secs = seconds_since(t0);
  o.require(worst_fne <= 1e-9, "firm nonexpansiveness violated");
  o.require(worst_margin >= -1e-8, "argmin oracle beaten");
  o.require(worst_eq <= 1e-8, "resolvent equation residual too large");
  o.require(secs < 60.0, "over 60 s");
  o.detail << (o.ok ? "" : " | ") << cases.size() << " kinds, fne violation " << worst_fne << ", argmin margin "
           << worst_margin << ", equation residual " << worst_eq << ", " << secs << " s";
  return o;
}

Outcome gram_suite() {
  Outcome o;
  Stream s(102, 1);
  double worst = 0.0, worst_match = 0.0;
  bool seen[3] = {false, false, false};
  auto check = [&](double shift, const std::vector<LinearOp>& ops) {
    const GramSolver q = GramSolver::build(shift, ops);
    seen[static_cast<int>(q.strategy())] = true;
    for (int t = 0; t < 20; ++t) {
      const Vec x = randn(s, q.dim());
      worst = std::max(worst, (GramSolver::apply_gram(shift, ops, q.solve(x)) - x).norm() / x.norm());
    }
    return q;
  };
  for (double shift : {1.0, 2.0}) {
    check(shift, {LinearOp::identity(9), LinearOp::identity(9), LinearOp::scaled(LinearOp::identity(9), 0.5)});
    Eigen::MatrixXd a(7, 11), b(3, 11);
    for (auto* m : {&a, &b})
      for (Eigen::Index i = 0; i < m->size(); ++i) m->data()[i] = s.normal();
    check(shift, {LinearOp::dense(a), LinearOp::dense(b)});
    for (const GridShape grid : {GridShape{1, 64}, GridShape{1, 37}, GridShape{8, 8}, GridShape{4, 6}}) {
      std::vector<LinearOp> circ{LinearOp::circulant(kernels::gaussian(grid, s.uniform(0.5, 3.0)), grid),
                                 LinearOp::circulant(kernels::uniform_horizontal(grid, 3), grid),
                                 LinearOp::identity(grid.size())};
      if (grid.rows > 1) circ.push_back(LinearOp::circulant(kernels::uniform_vertical(grid, 3), grid));
      const GramSolver spec = check(shift, circ);
      o.require(spec.strategy() == GramSolver::Strategy::Spectral, "circulant set not spectral");
      std::vector<LinearOp> dense;
      for (const auto& l : circ) dense.push_back(LinearOp::dense(l.to_dense()));
      const GramSolver chol = check(shift, dense);
      o.require(chol.strategy() == GramSolver::Strategy::Cholesky, "dense set not Cholesky");
      for (int t = 0; t < 20; ++t) {
        const Vec x = randn(s, grid.size());
        const Vec want = chol.solve(x);
        worst_match = std::max(worst_match, (spec.solve(x) - want).norm() / want.norm());
      }
    }
  }
  o.require(seen[0] && seen[1] && seen[2], "a strategy was never exercised");
  o.require(worst <= 1e-10, "inverse residual too large");
  o.require(worst_match <= 1e-8, "spectral and Cholesky disagree");
  o.detail << (o.ok ? "" : " | ") << "inverse residual " << worst << ", spectral vs Cholesky " << worst_match;
  return o;
}

Outcome toy_suite() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const InclusionProblem toy = build_toy();
  std::uint64_t worst_iter = 0;
  int runs = 0;
  for (Algorithm a : {Algorithm::F1, Algorithm::F2, Algorithm::F3Ex11, Algorithm::F3Ex12, Algorithm::F3Ex13,
                      Algorithm::RBCFB}) {
    const std::size_t n = framework_of(a) ? index_count(*framework_of(a), toy.p()) : toy.p();
    for (std::size_t b = 1; b <= n; ++b) {
      RunOptions opt;
      opt.block_size = b;
      opt.seed = 11;
      opt.initial_point = Vec::Constant(1, kToyStart);
      opt.record_every = 1000;
      StopRule stop;
      stop.max_iter = 50000;
      stop.reference = Vec::Zero(1);
      stop.target_db = -80.0;
      const RunResult r = solve(a, toy, opt, stop);
      ++runs;
      worst_iter = std::max(worst_iter, r.iterations);
      o.require(r.target_reached, to_string(a) + " b=" + std::to_string(b) + " missed -80 dB");
    }
  }
  const double secs = seconds_since(t0);
  o.require(secs < 30.0, "over 30 s");
  o.detail << (o.ok ? "" : " | ") << runs << " runs, worst " << worst_iter << " iterations, " << secs << " s";
  return o;
}

double relative(const Vec& a, const Vec& b) { return (a - b).norm() / std::max(a.norm(), b.norm()); }

Outcome hinge_suite() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const HingeSVM h = build_hinge_svm(60, 30, 7);
  // Strongly convex objective; two reference starts land on the same point.
  o.require(h.problem.a().kind() == ResolventOp::Kind::ProxQuadratic && h.alpha > 0.0, "objective not strongly convex");
  ReferenceOptions other;
  other.initial_point = Vec::Constant(60, 1.0);
  const Vec ref = reference_solution(h.problem).x;
  const double starts = relative(ref, reference_solution(h.problem, other).x);
  o.require(starts <= 1e-8, "reference depends on the start");

  std::vector<Vec> limits;
  std::uint64_t worst80 = 0;
  for (Framework f : kFrameworks) {
    RunOptions opt;
    opt.framework = f;
    opt.seed = 7;
    opt.record_every = 1000;
    StopRule stop;
    stop.max_iter = 200000;
    stop.reference = ref;
    stop.target_db = -80.0;
    const RunResult r = run(h.problem, opt, stop);
    worst80 = std::max(worst80, r.iterations);
    o.require(r.target_reached, to_string(f) + " missed -80 dB in 2e5 iterations");
    stop.max_iter = 2'000'000;
    stop.target_db = -120.0;
    limits.push_back(run(h.problem, opt, stop).x);
  }
  double pair = 0.0;
  for (std::size_t i = 0; i < limits.size(); ++i)
    for (std::size_t j = i + 1; j < limits.size(); ++j) pair = std::max(pair, relative(limits[i], limits[j]));
  o.require(pair <= 1e-5, "framework limits differ");

  RunOptions opt;
  opt.seed = 7;
  opt.record_every = 100000;
  StopRule stop;
  stop.max_iter = 20'000'000;
  stop.reference = ref;
  stop.target_db = -60.0;
  const RunResult apd = run_adaptive_pd(h.problem, opt, stop);
  o.require(apd.target_reached, "AdaptivePD missed -60 dB");
  const double secs = seconds_since(t0);
  o.require(secs < 180.0, "over 3 min");
  o.detail << (o.ok ? "" : " | ") << "start spread " << starts << ", worst -80 dB at " << worst80
           << " iterations, pairwise " << pair << ", AdaptivePD -60 dB at " << apd.iterations << " iterations, "
           << secs << " s";
  return o;
}

Outcome lasso_suite() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const GroupLasso g = build_group_lasso(60, 181, 2, 0);
  const Vec ref = reference_solution(g.problem).x;
  double worst = 0.0;
  for (Algorithm a : all_algorithms()) {
    if (!compatibility_issue(a, g.problem).empty()) continue;
    RunOptions opt;
    opt.seed = 5;
    opt.record_every = 10000;
    StopRule stop;
    stop.max_iter = 5'000'000;
    stop.reference = ref;
    stop.target_db = -100.0;
    const RunResult r = solve(a, g.problem, opt, stop);
    const double d = relative(r.x, ref);
    worst = std::max(worst, d);
    o.require(d <= 1e-4, to_string(a) + " off the reference");
  }
  const CoercivityReport w = check_coercivity_witness(g.problem);
  for (const auto& c : w.checks) o.require(c.passed, "witness " + c.name + ": " + c.detail);
  const double secs = seconds_since(t0);
  o.require(secs < 180.0, "over 3 min");
  o.detail << (o.ok ? "" : " | ") << "worst relative distance " << worst << ", " << w.checks.size()
           << " witness checks, " << secs << " s";
  return o;
}

Outcome phase_suite() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const PhaseRecon ph = build_phase_recon(32, 0);
  o.require(ph.problem.p() == 62, "expected 62 blocks");
  const cli::ReferenceCache cache(fs::temp_directory_path() / "rasplit-acceptance-cache");
  ExperimentSpec spec;
  spec.kind = ExperimentKind::PhaseRecon;
  spec.n = 32;
  const Instance inst = build_instance(spec);
  const Vec ref = cli::obtain_reference(inst, -200.0, cache).x;

  RunOptions opt;
  opt.block_size = 8;
  opt.seed = 3;
  opt.record_every = 1000;
  StopRule stop;
  stop.max_iter = 100000;
  stop.reference = ref;
  stop.target_db = -40.0;
  const RunResult r = run(ph.problem, opt, stop);
  o.require(r.target_reached, "missed -40 dB in 1e5 iterations");
  const double vi0 = vi_residual(ph.box, ph.problem, Vec::Zero(1024), 64);
  const double vi1 = vi_residual(ph.box, ph.problem, r.x, 64);
  o.require(vi1 <= 1e-3 * vi0, "vi residual ratio above 1e-3");

  const PhaseRecon clean = build_phase_recon(32, 0, std::nullopt, true);
  const double vic = vi_residual(clean.box, clean.problem, clean.truth, 64);
  o.require(vic <= 1e-9, "consistent data has nonzero vi residual");
  const double secs = seconds_since(t0);
  o.require(secs < 600.0, "over 10 min");
  o.detail << (o.ok ? "" : " | ") << r.iterations << " iterations, vi ratio " << vi1 / vi0 << ", consistent vi "
           << vic << ", " << secs << " s";
  return o;
}

// State components written by index l (0-based).
using Family = std::vector<Vec> EngineState::*;
std::vector<std::pair<Family, std::size_t>> owned(Framework f, std::size_t p, std::size_t l) {
  if (f == Framework::F1) {
    if (l == 0) return {{&EngineState::x, 0}, {&EngineState::z, 0}};
    return {{&EngineState::y, l - 1}, {&EngineState::w, l - 1}};
  }
  if (l <= p) return {{&EngineState::x, l}, {&EngineState::z, l}};
  if (f == Framework::F2) {
    std::vector<std::pair<Family, std::size_t>> out;
    for (std::size_t i = 0; i <= p; ++i) {
      out.push_back({&EngineState::u, i});
      out.push_back({&EngineState::v, i});
    }
    return out;
  }
  return {{&EngineState::y, l - p - 1}, {&EngineState::w, l - p - 1}};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism_suite() {
  Outcome o;
  const HingeSVM h = build_hinge_svm(6, 5, 2);
  const GroupLasso g = build_group_lasso(12, 21, 2, 3);
  std::uint64_t checked = 0;
  for (Framework f : kFrameworks) {
    for (const InclusionProblem* pb : {&h.problem, &g.problem}) {
      if ((f == Framework::F3Ex12 || f == Framework::F3Ex13) && !pb->all_identity_links()) continue;
      Engine e(*pb, f, EngineParams{});
      EngineState st = e.initial_state();
      for (std::size_t b = 1; b < e.index_count(); ++b) {
        ActivationSchedule sch(e.index_count(), b, 40 + b);
        for (int t = 0; t < 100; ++t) {
          const EngineState before = st;
          const Mask m = sch.sample();
          e.step(st, m);
          for (std::size_t l = 0; l < m.size(); ++l) {
            if (m[l]) continue;
            for (const auto& [fam, pos] : owned(f, pb->p(), l)) {
              ++checked;
              if (!((st.*fam)[pos].array() == (before.*fam)[pos].array()).all())
                o.require(false, to_string(f) + " changed inactive index " + std::to_string(l + 1));
            }
          }
        }
      }
    }
  }

  const fs::path root = fs::temp_directory_path() / "rasplit-acceptance-det";
  fs::remove_all(root);
  fs::create_directories(root);
  cli::RunConfig c;
  c.experiment.kind = ExperimentKind::SignalRestoration;
  c.experiment.n = 128;
  c.experiment.m = 4;
  c.experiment.seed = 9;
  c.algorithm = Algorithm::F2;
  c.block_size = 3;
  c.seed = 4;
  c.max_iter = 500;
  c.record_every = 5;
  c.out_dir = root.string();
  const cli::ReferenceCache cache(root / "cache");
  cli::run_experiment(c, cache);
  const std::string first = slurp(root / "trace.csv"), first_summary = slurp(root / "summary.json");
  cli::run_experiment(c, cli::ReferenceCache(root / "cache2"));
  o.require(!first.empty() && slurp(root / "trace.csv") == first, "trace.csv differs between runs");
  o.require(slurp(root / "summary.json") == first_summary, "summary.json differs between runs");

  RunOptions opt;
  StopRule stop;
  stop.max_iter = 400;
  const RunResult a = run(g.problem, opt, stop), b = run(g.problem, opt, stop);
  Engine e(g.problem, Framework::F1, EngineParams{});
  EngineState st = e.initial_state();
  const Mask all(e.index_count(), 1);
  for (int t = 0; t < 400; ++t) e.step(st, all);
  o.require((a.x.array() == b.x.array()).all(), "full-activation runs differ");
  o.require((a.x.array() == st.primal().array()).all(), "run differs from deterministic stepping");
  o.detail << (o.ok ? "" : " | ") << checked << " inactive blocks compared, traces byte-identical";
  return o;
}

Outcome error_suite() {
  Outcome o;
  const InclusionProblem toy = build_toy();
  double worst = -kInf;
  for (Framework f : kFrameworks) {
    for (std::size_t b = 1; b <= index_count(f, toy.p()); ++b) {
      RunOptions opt;
      opt.framework = f;
      opt.block_size = b;
      opt.seed = 21;
      opt.errors = ErrorInjector::summable_gaussian(1.0, 2.0, 22);
      opt.initial_point = Vec::Constant(1, kToyStart);
      opt.record_every = 1000;
      StopRule stop;
      stop.max_iter = 50000;
      stop.reference = Vec::Zero(1);
      stop.target_db = -60.0;
      const RunResult r = run(toy, opt, stop);
      worst = std::max(worst, r.trace.back().err_db);
      o.require(r.target_reached, to_string(f) + " b=" + std::to_string(b) + " missed -60 dB");
    }
  }
  o.detail << (o.ok ? "" : " | ") << "worst final error " << worst << " dB";
  return o;
}

Outcome accounting_suite() {
  Outcome o;
  for (std::size_t p : {1u, 5u, 30u}) {
    const HingeSVM h = build_hinge_svm(4, p, 1);
    for (Framework f : kFrameworks) {
      const std::size_t r = f == Framework::F3Ex13 ? p + 1 : p;
      const std::size_t want = f == Framework::F1 ? 2 * p + 3 : f == Framework::F2 ? 4 * p + 5 : 2 * p + 2 * r + 2;
      const std::size_t got = stored_vectors(make_state(f, h.problem));
      o.require(got == want, to_string(f) + " p=" + std::to_string(p) + " stores " + std::to_string(got));
      o.require(stored_vector_formula(f, p) == want, to_string(f) + " formula mismatch");
    }
  }

  const GroupLasso g = build_group_lasso(12, 21, 2, 6);
  const std::size_t p = g.problem.p(), n = p + 2;
  double worst = 0.0;
  for (std::size_t b : {std::size_t{1}, std::size_t{3}, n / 2, n}) {
    Engine e(g.problem, Framework::F2, EngineParams{});
    EngineState st = e.initial_state();
    ActivationSchedule sch(n, b, 70 + b);
    std::uint64_t coupling_active = 0;
    constexpr int kIters = 10000;
    for (int t = 0; t < kIters; ++t) {
      const Mask m = sch.sample();
      coupling_active += m[p + 1];
      e.step(st, m);
    }
    const double expected = static_cast<double>(b) / static_cast<double>(n) * kIters;
    const double solves = static_cast<double>(e.counters().gram_solves);
    worst = std::max(worst, std::abs(solves - expected) / expected);
    o.require(e.counters().gram_solves == coupling_active, "gram solve outside index p+2");
    o.require(std::abs(solves - expected) <= 0.05 * expected, "gram solves off by more than 5%");
  }
  o.detail << (o.ok ? "" : " | ") << "storage formulas hold for p in {1,5,30}, gram solve deviation " << worst;
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Outcome (*fn)();
  };
  const Criterion all[] = {
      {"resolvent suite", resolvent_suite},  {"gram solvers", gram_suite},
      {"toy inclusion", toy_suite},          {"hinge desk scale", hinge_suite},
      {"group lasso desk scale", lasso_suite}, {"phase reconstruction desk scale", phase_suite},
      {"gating and determinism", determinism_suite}, {"error robustness", error_suite},
      {"storage and gram accounting", accounting_suite},
  };
  int failed = 0, id = 0;
  for (const auto& c : all) {
    ++id;
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail << "exception: " << e.what();
    }
    failed += !o.ok;
    std::printf("%s criterion %d (%s): %s\n", o.ok ? "PASS" : "FAIL", id, c.name, o.detail.str().c_str());
    std::fflush(stdout);
  }
  return failed;
}
