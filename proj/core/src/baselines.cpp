#include "rasplit/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace rasplit {

namespace {

double l1(const Vec& v) { return v.cwiseAbs().sum(); }

template <class ApplyGram>
double power_iteration(std::size_t n, ApplyGram&& gram, std::size_t max_iter, double tol, std::uint64_t seed) {
  Stream s(seed, 0x90E);
  Vec v(static_cast<Eigen::Index>(n));
  for (auto& vi : v) vi = s.normal();
  v.normalize();
  double est = 0.0;
  for (std::size_t it = 0; it < max_iter; ++it) {
    Vec g = gram(v);
    const double nrm = g.norm();
    if (nrm == 0.0) return 0.0;
    const double prev = est;
    est = nrm;
    v = g / nrm;
    if (it > 0 && std::abs(est - prev) <= tol * est) break;
  }
  return std::sqrt(est);
}

void check_finite(const Vec& v, std::uint64_t n, const std::string& who) {
  if (!v.allFinite()) {
    throw DivergenceError(n, who, "non-finite iterate at iteration " + std::to_string(n) + " after " + who);
  }
}

}  // namespace

double operator_norm(const LinearOp& op, std::size_t max_iter, double tol, std::uint64_t seed) {
  return power_iteration(op.in_dim(), [&](const Vec& v) { return op.adjoint_apply(op.apply(v)); },
                         max_iter, tol, seed);
}

double stacked_operator_norm(std::span<const LinearOp> ops, std::size_t max_iter, double tol, std::uint64_t seed) {
  require(!ops.empty(), "stacked_operator_norm: no operators");
  return power_iteration(
      ops[0].in_dim(),
      [&](const Vec& v) {
        Vec g = Vec::Zero(v.size());
        for (const auto& op : ops) g += op.adjoint_apply(op.apply(v));
        return g;
      },
      max_iter, tol, seed);
}

AdaptivePDParams AdaptivePDParams::defaults(const InclusionProblem& pb) {
  AdaptivePDParams a;
  const double p = static_cast<double>(pb.p());
  for (const auto& L : pb.links()) a.block_norms.push_back(operator_norm(L));
  a.stacked_norm = stacked_operator_norm(pb.links());
  const double max_sq = std::pow(*std::max_element(a.block_norms.begin(), a.block_norms.end()), 2);
  a.tau0 = 0.9 / std::sqrt(p);
  a.sigma0 = 1.0 / (std::sqrt(p) * max_sq);
  a.probabilities.assign(pb.p(), 1.0 / p);
  a.validate();
  return a;
}

void AdaptivePDParams::validate() const {
  require(tau0 > 0.0 && sigma0 > 0.0, "adaptive PD: tau0 and sigma0 must be positive");
  require(chi0 >= 0.0 && chi0 < 1.0, "adaptive PD: chi0 must lie in [0,1[");
  require(eta > 0.0 && eta < 1.0, "adaptive PD: eta must lie in ]0,1[");
  require(delta > 1.0, "adaptive PD: delta must exceed 1");
  require(!probabilities.empty() && probabilities.size() == block_norms.size(),
          "adaptive PD: one probability and one norm per block");
  double sum = 0.0, worst = 0.0;
  for (std::size_t k = 0; k < probabilities.size(); ++k) {
    require(probabilities[k] > 0.0, "adaptive PD: probabilities must be positive");
    sum += probabilities[k];
    worst = std::max(worst, block_norms[k] * block_norms[k] / probabilities[k]);
  }
  require(std::abs(sum - 1.0) <= 1e-12, "adaptive PD: probabilities must sum to 1");
  if (!(tau0 * sigma0 * worst < 1.0)) {
    throw InvalidArgument("adaptive PD: step condition tau0*sigma0*max ||L_k||^2/pi_k < 1 violated");
  }
}

AdaptivePDState make_adaptive_pd_state(const InclusionProblem& pb, const AdaptivePDParams& params, const Vec* x0) {
  params.validate();
  AdaptivePDState s;
  s.x = x0 ? *x0 : Vec::Zero(static_cast<Eigen::Index>(pb.dim()));
  require_dim(static_cast<std::size_t>(s.x.size()), pb.dim(), "adaptive PD initial point");
  for (const auto& L : pb.links()) s.y.push_back(Vec::Zero(static_cast<Eigen::Index>(L.out_dim())));
  s.z = s.y;
  s.tau = params.tau0;
  s.sigma = params.sigma0;
  s.chi = params.chi0;
  s.aggregate = Vec::Zero(s.x.size());
  return s;
}

void adaptive_pd_step(AdaptivePDState& s, const InclusionProblem& pb, const AdaptivePDParams& prm,
                      std::size_t k, EngineCounters* counters, IterationCost* cost) {
  require(k < pb.p(), "adaptive_pd_step: block index out of range");
  if (cost) cost->reset(1);
  auto add = [&](double c) {
    if (cost) cost->per_index[0] += c;
  };

  const double band = prm.stacked_norm * s.nu;
  if (s.rho > band * prm.delta) {
    s.tau /= (1.0 - s.chi);
    s.sigma *= (1.0 - s.chi);
    s.chi *= prm.eta;
  } else if (s.rho < band / prm.delta) {
    s.tau *= (1.0 - s.chi);
    s.sigma /= (1.0 - s.chi);
    s.chi *= prm.eta;
  }

  const Vec x_old = s.x;
  s.x = pb.a().resolve(s.tau, x_old - s.tau * s.aggregate);
  add(pb.a().cost() + 3.0 * static_cast<double>(x_old.size()));
  check_finite(s.x, s.n, pb.a().name());

  const LinearOp& L = pb.links()[k];
  const Vec y_old = s.y[k];
  const Vec lx = L.apply(s.x);
  s.y[k] = inverse_resolvent(s.sigma, pb.block(k).op, y_old + s.sigma * lx);
  add(L.cost() + pb.block(k).op.cost());
  check_finite(s.y[k], s.n, pb.block(k).op.name());
  if (counters) {
    counters->resolvent_calls += 2;
    counters->linop_applications += 4;
  }

  // Blocks not drawn this iteration have z = y; only block k is extrapolated.
  const double inv_pi = 1.0 / prm.probabilities[k];
  if (s.extrapolated >= 0 && static_cast<std::size_t>(s.extrapolated) != k) {
    const auto j = static_cast<std::size_t>(s.extrapolated);
    s.aggregate += pb.links()[j].adjoint_apply(s.y[j] - s.z[j]);
    s.z[j] = s.y[j];
    add(pb.links()[j].cost());
  }
  const Vec z_new = s.y[k] + inv_pi * (s.y[k] - y_old);
  s.aggregate += L.adjoint_apply(z_new - s.z[k]);
  s.z[k] = z_new;
  s.extrapolated = static_cast<long>(k);

  const Vec dx = x_old - s.x;
  const Vec dy = y_old - s.y[k];
  s.rho = l1(dx / s.tau - inv_pi * L.adjoint_apply(dy));
  s.nu = inv_pi * l1(L.apply(dx) - dy / s.sigma);
  add(3.0 * L.cost() + 8.0 * static_cast<double>(dx.size()));
  ++s.n;
  if (counters) ++counters->iterations;
}

RBCFBParams RBCFBParams::defaults(const InclusionProblem& pb) {
  RBCFBParams r;
  const double tau = 1.0 / std::sqrt(2.0 * static_cast<double>(pb.p()));
  r.w = 0.9 * tau;
  for (const auto& L : pb.links()) {
    const double nrm = operator_norm(L);
    require(nrm > 0.0, "RBCFB: zero linear operator");
    r.block_norms.push_back(nrm);
    r.u.push_back(tau / (nrm * nrm));
  }
  r.lambda = 1.0;
  r.validate();
  return r;
}

double RBCFBParams::condition_value() const {
  double s = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) s += u[k] * w * block_norms[k] * block_norms[k];
  return s;
}

void RBCFBParams::validate() const {
  require(w > 0.0, "RBCFB: w must be positive");
  require(!u.empty() && u.size() == block_norms.size(), "RBCFB: one step and one norm per block");
  for (double uk : u) require(uk > 0.0, "RBCFB: u_k must be positive");
  require(lambda > 0.0 && lambda <= 1.0, "RBCFB: lambda must lie in ]0,1]");
  if (!(condition_value() < 0.5)) {
    throw InvalidArgument("RBCFB: step condition sum_k u_k w ||L_k||^2 < 1/2 violated");
  }
}

RBCFBState make_rbcfb_state(const InclusionProblem& pb, const Vec* x0) {
  RBCFBState s;
  s.x = x0 ? *x0 : Vec::Zero(static_cast<Eigen::Index>(pb.dim()));
  require_dim(static_cast<std::size_t>(s.x.size()), pb.dim(), "RBCFB initial point");
  for (const auto& L : pb.links()) s.v.push_back(Vec::Zero(static_cast<Eigen::Index>(L.out_dim())));
  s.aggregate = Vec::Zero(s.x.size());
  return s;
}

void rbc_fb_step(RBCFBState& s, const InclusionProblem& pb, const RBCFBParams& prm, const Mask& mask,
                 const ErrorInjector* errors, EngineCounters* counters, IterationCost* cost) {
  const std::size_t p = pb.p();
  require_dim(mask.size(), p, "rbc_fb_step mask");
  require(std::any_of(mask.begin(), mask.end(), [](auto m) { return m != 0; }),
          "rbc_fb_step: mask must activate at least one index");
  if (cost) cost->reset(p);

  Vec y1 = pb.a().resolve(prm.w, s.x - prm.w * s.aggregate);
  if (errors) errors->perturb(ErrorSeq::A, s.n, 0, y1);
  check_finite(y1, s.n, pb.a().name());
  if (cost) cost->shared += pb.a().cost() + 4.0 * static_cast<double>(y1.size());
  if (counters) ++counters->resolvent_calls;

  const Vec x_old = s.x;
  s.x = x_old + prm.lambda * (y1 - x_old);
  const Vec probe = 2.0 * y1 - x_old;
  for (std::size_t k = 0; k < p; ++k) {
    if (!mask[k]) continue;
    const LinearOp& L = pb.links()[k];
    Vec uk = inverse_resolvent(prm.u[k], pb.block(k).op, s.v[k] + prm.u[k] * L.apply(probe));
    if (errors) errors->perturb(ErrorSeq::B, s.n, 1 + k, uk);
    check_finite(uk, s.n, pb.block(k).op.name());
    const Vec dv = prm.lambda * (uk - s.v[k]);
    s.v[k] += dv;
    s.aggregate += L.adjoint_apply(dv);
    if (cost) cost->per_index[k] += 2.0 * L.cost() + pb.block(k).op.cost() + 4.0 * static_cast<double>(dv.size());
    if (counters) {
      ++counters->resolvent_calls;
      counters->linop_applications += 2;
    }
  }
  ++s.n;
  if (counters) ++counters->iterations;
}

namespace {

template <class StepFn>
RunResult run_loop(const InclusionProblem& pb, const RunOptions& opt, const StopRule& stop, const Vec& x0,
                   StepFn&& step, std::size_t stored) {
  require(opt.cores >= 1, "cores must be at least 1");
  TraceRecorder rec(stop, x0, opt.record_every, opt.record_objective && pb.is_minimization() ? &pb : nullptr);
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  auto wall = [&] { return std::chrono::duration<double>(clock::now() - t0).count(); };

  RunResult out;
  double sim = 0.0;
  double err = rec.observe(0, x0, nullptr, 0.0, 0.0, true);
  bool reached = rec.target_reached(err);
  IterationCost cost;
  std::uint64_t it = 0;
  Vec x = x0;
  while (!reached && it < stop.max_iter) {
    Mask mask;
    x = step(it, mask, cost, out.counters);
    sim += cost.makespan(opt.cores) / kWorkUnitsPerSecond;
    ++it;
    err = rec.observe(it, x, &mask, sim, wall(), it == stop.max_iter);
    reached = rec.target_reached(err);
  }
  out.x = x;
  out.trace = rec.take();
  out.iterations = it;
  out.target_reached = reached;
  out.sim_time_s = sim;
  out.wall_time_s = wall();
  out.stored_vectors = stored;
  return out;
}

}  // namespace

RunResult run_adaptive_pd(const InclusionProblem& pb, const RunOptions& opt, const StopRule& stop) {
  require(pb.is_minimization(), "adaptive PD requires a minimization problem");
  const AdaptivePDParams prm = AdaptivePDParams::defaults(pb);
  AdaptivePDState st = make_adaptive_pd_state(pb, prm, opt.initial_point ? &*opt.initial_point : nullptr);
  const Stream draws(opt.seed, 0xAD);
  const std::size_t p = pb.p();
  auto step = [&](std::uint64_t it, Mask& mask, IterationCost& cost, EngineCounters& counters) {
    Stream s = draws.child(it);
    const double u = s.uniform();
    std::size_t k = 0;
    double acc = prm.probabilities[0];
    while (k + 1 < p && u >= acc) acc += prm.probabilities[++k];
    mask.assign(p, 0);
    mask[k] = 1;
    adaptive_pd_step(st, pb, prm, k, &counters, &cost);
    return st.x;
  };
  return run_loop(pb, opt, stop, st.x, step, 1 + 2 * p);
}

RunResult run_rbcfb(const InclusionProblem& pb, const RunOptions& opt, const StopRule& stop) {
  const RBCFBParams prm = RBCFBParams::defaults(pb);
  RBCFBState st = make_rbcfb_state(pb, opt.initial_point ? &*opt.initial_point : nullptr);
  const std::size_t p = pb.p();
  const std::size_t b = opt.block_size == 0 ? p : opt.block_size;
  ActivationSchedule schedule(p, b, opt.seed);
  const ErrorInjector* errors = opt.errors.active() ? &opt.errors : nullptr;
  auto step = [&](std::uint64_t, Mask& mask, IterationCost& cost, EngineCounters& counters) {
    mask = schedule.sample();
    rbc_fb_step(st, pb, prm, mask, errors, &counters, &cost);
    return st.x;
  };
  return run_loop(pb, opt, stop, st.x, step, 1 + p);
}

}  // namespace rasplit
