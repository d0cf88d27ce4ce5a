#include "rasplit/engine.hpp"

#include <sstream>

namespace rasplit {

namespace {

// Shared bookkeeping for one step.
class StepCtx {
 public:
  StepCtx(const EngineState& state, const StepOptions& o, std::size_t n_indices)
      : o_(o), n_(state.n) {
    o.params.validate();
    if (o_.cost) o_.cost->reset(n_indices);
  }

  Vec resolve(const ResolventOp& op, const Vec& x, std::size_t index, ErrorSeq seq,
              std::size_t err_index) const {
    Vec r = op.resolve(o_.params.gamma, x);
    if (o_.counters) ++o_.counters->resolvent_calls;
    if (o_.errors) o_.errors->perturb(seq, n_, err_index, r);
    add(index, op.cost());
    check(r, op.name());
    return r;
  }

  Vec apply(const LinearOp& L, const Vec& x, std::size_t index) const {
    if (o_.counters) ++o_.counters->linop_applications;
    add(index, L.cost());
    return L.apply(x);
  }
  Vec adjoint(const LinearOp& L, const Vec& y, std::size_t index) const {
    if (o_.counters) ++o_.counters->linop_applications;
    add(index, L.cost());
    return L.adjoint_apply(y);
  }
  // Shared work (index == npos).
  Vec apply_shared(const LinearOp& L, const Vec& x) const { return apply(L, x, npos); }
  Vec adjoint_shared(const LinearOp& L, const Vec& y) const { return adjoint(L, y, npos); }

  Vec gram(const GramSolver& g, const Vec& rhs, std::size_t index) const {
    Vec s = g.solve(rhs);
    if (o_.counters) ++o_.counters->gram_solves;
    add(index, g.cost());
    if (o_.errors) o_.errors->perturb(ErrorSeq::E, n_, 0, s);
    check(s, "GramSolver");
    return s;
  }

  void vec_work(std::size_t index, const Vec& v, double passes) const {
    add(index, passes * static_cast<double>(v.size()));
  }

  double lambda() const { return o_.params.lambda; }

  void check(const Vec& v, const std::string& who) const {
    if (!v.allFinite()) {
      std::ostringstream os;
      os << "non-finite iterate at iteration " << n_ << " after " << who;
      throw DivergenceError(n_, who, os.str());
    }
  }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  void add(std::size_t index, double c) const {
    if (!o_.cost) return;
    if (index == npos) o_.cost->shared += c;
    else o_.cost->per_index[index] += c;
  }
  const StepOptions& o_;
  std::uint64_t n_;
};

void check_mask(const Mask& mask, std::size_t want, const char* who) {
  if (mask.size() != want) {
    throw DimensionError(std::string(who) + ": mask length " + std::to_string(mask.size()) +
                         ", expected " + std::to_string(want));
  }
  bool any = false;
  for (auto m : mask) any = any || m != 0;
  if (!any) throw InvalidArgument(std::string(who) + ": mask must activate at least one index");
}

void check_state(const EngineState& s, Framework f, const char* who) {
  if (s.framework != f) throw InvalidArgument(std::string(who) + ": state belongs to another framework");
}

// Periodic full recomputation keeps incrementally maintained sums from drifting.
constexpr std::uint64_t kAuxRefreshFactor = 64;

void refresh_f1(EngineState& st, const InclusionProblem& pb, const StepCtx& ctx) {
  Vec acc = Vec::Zero(static_cast<Eigen::Index>(pb.dim()));
  for (std::size_t k = 0; k < pb.p(); ++k) acc += ctx.adjoint_shared(pb.links()[k], st.w[k]);
  st.aux[0] = std::move(acc);
  st.aux_updates = 0;
}

void refresh_coupled(EngineState& st, const InclusionProblem& pb, const StepCtx& ctx, bool use_links) {
  Vec acc = Vec::Zero(static_cast<Eigen::Index>(pb.dim()));
  for (std::size_t k = 0; k < pb.p(); ++k) {
    const Vec t = st.z[k + 1] + st.w[k];
    acc += use_links ? ctx.adjoint_shared(pb.links()[k], t) : t;
  }
  st.aux[0] = std::move(acc);
  st.aux_updates = 0;
}

void refresh_ex13(EngineState& st) {
  Vec sz = Vec::Zero(st.z[0].size()), sw = Vec::Zero(st.z[0].size());
  for (std::size_t l = 0; l < st.z.size(); ++l) {
    sz += st.z[l];
    sw += st.w[l];
  }
  st.aux[0] = std::move(sz);
  st.aux[1] = std::move(sw);
  st.aux_updates = 0;
}

// ex11 with general links (Gram solve) or ex12 with identity links (closed form).
void coupled_step(EngineState& st, const InclusionProblem& pb, const GramSolver* gram2,
                  const Mask& mask, const StepOptions& opts, const char* who) {
  const std::size_t p = pb.p();
  check_mask(mask, 2 * p + 1, who);
  StepCtx ctx(st, opts, 2 * p + 1);
  const bool links = gram2 != nullptr;

  Vec rhs = 2.0 * st.z[0] + st.aux[0];
  ctx.vec_work(StepCtx::npos, rhs, 2);
  Vec q;
  if (links) {
    q = ctx.gram(*gram2, rhs, StepCtx::npos);
  } else {
    q = rhs / static_cast<double>(p + 2);
    if (opts.errors) opts.errors->perturb(ErrorSeq::E, st.n, 0, q);
    ctx.check(q, "coupling average");
  }

  // Read phase: linear targets from the iteration-start snapshot.
  std::vector<Vec> xt(p), yt(p);
  for (std::size_t k = 0; k < p; ++k) {
    const bool agent = mask[1 + k] != 0, dual = mask[p + 1 + k] != 0;
    if (!agent && !dual) continue;
    Vec lq_a, lq_d;
    if (agent) lq_a = links ? ctx.apply(pb.links()[k], q, 1 + k) : q;
    if (dual) lq_d = links ? ctx.apply(pb.links()[k], q, p + 1 + k) : q;
    if (agent) xt[k] = 0.5 * (lq_a + st.z[k + 1] - st.w[k]);
    if (dual) yt[k] = 0.5 * (lq_d - st.z[k + 1] + st.w[k]);
  }

  // Write phase.
  const double lam = ctx.lambda();
  if (mask[0]) {
    st.x[0] = q;
    const Vec r = ctx.resolve(pb.a(), 2.0 * st.x[0] - st.z[0], 0, ErrorSeq::C, 0);
    st.z[0] += lam * (r - st.x[0]);
    ctx.vec_work(0, r, 4);
  }
  std::size_t changed = 0;
  for (std::size_t k = 0; k < p; ++k) {
    const bool agent = mask[1 + k] != 0, dual = mask[p + 1 + k] != 0;
    if (!agent && !dual) continue;
    Vec delta = Vec::Zero(st.w[k].size());
    if (agent) {
      st.x[k + 1] = std::move(xt[k]);
      const Vec r = ctx.resolve(pb.block(k).op, 2.0 * st.x[k + 1] - st.z[k + 1], 1 + k, ErrorSeq::C, 1 + k);
      const Vec dz = lam * (r - st.x[k + 1]);
      st.z[k + 1] += dz;
      delta += dz;
      ctx.vec_work(1 + k, r, 6);
    }
    if (dual) {
      st.y[k] = std::move(yt[k]);
      const Vec dw = -lam * st.y[k];
      st.w[k] += dw;
      delta += dw;
      ctx.vec_work(p + 1 + k, dw, 4);
    }
    // Each contributing index pays for its share of the running sum update.
    const std::size_t payer = agent ? 1 + k : p + 1 + k;
    st.aux[0] += links ? ctx.adjoint(pb.links()[k], delta, payer) : delta;
    ++changed;
  }
  st.aux_updates += changed;
  if (st.aux_updates >= kAuxRefreshFactor * p) refresh_coupled(st, pb, ctx, links);
  ++st.n;
  if (opts.counters) ++opts.counters->iterations;
}

}  // namespace

std::size_t stored_vectors(const EngineState& s) {
  std::size_t n = s.x.size() + s.z.size() + s.y.size() + s.w.size() + s.u.size() + s.v.size();
  if (s.s.size() > 0) ++n;
  return n;
}

std::size_t auxiliary_vectors(const EngineState& s) { return s.aux.size(); }

EngineState make_state(Framework f, const InclusionProblem& pb, const Vec* x0) {
  const std::size_t p = pb.p();
  const auto N = static_cast<Eigen::Index>(pb.dim());
  Vec base = Vec::Zero(N);
  if (x0) {
    require_dim(static_cast<std::size_t>(x0->size()), pb.dim(), "initial point");
    base = *x0;
  }
  std::vector<Vec> images;
  for (std::size_t k = 0; k < p; ++k) {
    images.push_back(x0 ? pb.links()[k].apply(base) : Vec::Zero(static_cast<Eigen::Index>(pb.links()[k].out_dim())));
  }
  auto zeros_like = [](const std::vector<Vec>& vs) {
    std::vector<Vec> out;
    for (const auto& v : vs) out.push_back(Vec::Zero(v.size()));
    return out;
  };
  std::vector<Vec> agents{base};
  agents.insert(agents.end(), images.begin(), images.end());

  EngineState s;
  s.framework = f;
  switch (f) {
    case Framework::F1:
      s.x = {base};
      s.z = {base};
      s.y = images;
      s.w = images;
      s.s = base;
      s.aux = {Vec::Zero(N)};
      for (std::size_t k = 0; k < p; ++k) s.aux[0] += pb.links()[k].adjoint_apply(s.w[k]);
      break;
    case Framework::F2:
      s.x = s.z = s.u = s.v = agents;
      s.s = base;
      break;
    case Framework::F3Ex11:
    case Framework::F3Ex12:
      if (f == Framework::F3Ex12) require(pb.all_identity_links(), "f3-ex12 requires identity links");
      s.x = s.z = agents;
      s.y = s.w = zeros_like(images);
      s.aux = {Vec::Zero(N)};
      for (std::size_t k = 0; k < p; ++k) s.aux[0] += pb.links()[k].adjoint_apply(s.z[k + 1] + s.w[k]);
      break;
    case Framework::F3Ex13:
      require(pb.all_identity_links(), "f3-ex13 requires identity links");
      s.x = s.z = agents;
      s.y = s.w = zeros_like(agents);
      s.aux = {Vec::Zero(N), Vec::Zero(N)};
      refresh_ex13(s);
      break;
  }
  return s;
}

void framework1_step(EngineState& st, const InclusionProblem& pb, const GramSolver& gram1,
                     const Mask& mask, const StepOptions& opts) {
  check_state(st, Framework::F1, "framework1_step");
  require(gram1.shift() == 1.0, "framework1_step: Gram solver must have shift 1");
  const std::size_t p = pb.p();
  check_mask(mask, p + 1, "framework1_step");
  StepCtx ctx(st, opts, p + 1);
  const double lam = ctx.lambda();

  st.s = ctx.gram(gram1, st.z[0] + st.aux[0], StepCtx::npos);

  if (mask[0]) {
    st.x[0] = st.s;
    const Vec r = ctx.resolve(pb.a(), 2.0 * st.x[0] - st.z[0], 0, ErrorSeq::C, 0);
    st.z[0] += lam * (r - st.x[0]);
    ctx.vec_work(0, r, 4);
  }
  std::size_t changed = 0;
  for (std::size_t k = 0; k < p; ++k) {
    if (!mask[1 + k]) continue;
    const LinearOp& L = pb.links()[k];
    st.y[k] = ctx.apply(L, st.s, 1 + k);
    const Vec r = ctx.resolve(pb.block(k).op, 2.0 * st.y[k] - st.w[k], 1 + k, ErrorSeq::D, 1 + k);
    const Vec dw = lam * (r - st.y[k]);
    st.w[k] += dw;
    st.aux[0] += ctx.adjoint(L, dw, 1 + k);
    ctx.vec_work(1 + k, r, 5);
    ++changed;
  }
  st.aux_updates += changed;
  if (st.aux_updates >= kAuxRefreshFactor * p) refresh_f1(st, pb, ctx);
  ++st.n;
  if (opts.counters) ++opts.counters->iterations;
}

void framework2_step(EngineState& st, const InclusionProblem& pb, const GramSolver& gram1,
                     const Mask& mask, const StepOptions& opts) {
  check_state(st, Framework::F2, "framework2_step");
  require(gram1.shift() == 1.0, "framework2_step: Gram solver must have shift 1");
  const std::size_t p = pb.p();
  check_mask(mask, p + 2, "framework2_step");
  StepCtx ctx(st, opts, p + 2);
  const double lam = ctx.lambda();
  const bool couple = mask[p + 1] != 0;

  // Read phase.
  std::vector<Vec> xt(p + 1), ut;
  for (std::size_t i = 0; i <= p; ++i)
    if (mask[i]) xt[i] = 0.5 * (st.z[i] + st.v[i]);
  if (couple) {
    ut.resize(p + 1);
    for (std::size_t i = 0; i <= p; ++i) ut[i] = 0.5 * (st.z[i] + st.v[i]);
  }

  // Agents.
  for (std::size_t i = 0; i <= p; ++i) {
    if (!mask[i]) continue;
    st.x[i] = std::move(xt[i]);
    const ResolventOp& op = i == 0 ? pb.a() : pb.block(i - 1).op;
    const Vec r = ctx.resolve(op, 2.0 * st.x[i] - st.z[i], i, ErrorSeq::C, i);
    st.z[i] += lam * (r - st.x[i]);
    ctx.vec_work(i, r, 6);
  }

  // Projection onto the graph, owned by index p+2.
  if (couple) {
    const std::size_t me = p + 1;
    for (std::size_t i = 0; i <= p; ++i) st.u[i] = std::move(ut[i]);
    Vec rhs = 2.0 * st.u[0] - st.v[0];
    for (std::size_t k = 0; k < p; ++k) rhs += ctx.adjoint(pb.links()[k], 2.0 * st.u[k + 1] - st.v[k + 1], me);
    st.s = ctx.gram(gram1, rhs, me);
    st.v[0] += lam * (st.s - st.u[0]);
    for (std::size_t k = 0; k < p; ++k) {
      st.v[k + 1] += lam * (ctx.apply(pb.links()[k], st.s, me) - st.u[k + 1]);
      ctx.vec_work(me, st.v[k + 1], 6);
    }
  }
  ++st.n;
  if (opts.counters) ++opts.counters->iterations;
}

void framework3_step_ex11(EngineState& st, const InclusionProblem& pb, const GramSolver& gram2,
                          const Mask& mask, const StepOptions& opts) {
  check_state(st, Framework::F3Ex11, "framework3_step_ex11");
  require(gram2.shift() == 2.0, "framework3_step_ex11: Gram solver must have shift 2");
  coupled_step(st, pb, &gram2, mask, opts, "framework3_step_ex11");
}

void framework3_step_ex12(EngineState& st, const InclusionProblem& pb, const Mask& mask,
                          const StepOptions& opts) {
  check_state(st, Framework::F3Ex12, "framework3_step_ex12");
  require(pb.all_identity_links(), "framework3_step_ex12: all links must be identities");
  coupled_step(st, pb, nullptr, mask, opts, "framework3_step_ex12");
}

void framework3_step_ex13(EngineState& st, const InclusionProblem& pb, const Mask& mask,
                          const StepOptions& opts) {
  check_state(st, Framework::F3Ex13, "framework3_step_ex13");
  require(pb.all_identity_links(), "framework3_step_ex13: all links must be identities");
  const std::size_t p = pb.p(), m = p + 1;
  check_mask(mask, 2 * m, "framework3_step_ex13");
  StepCtx ctx(st, opts, 2 * m);
  const double lam = ctx.lambda();
  const double c = 1.0 / (2.0 * static_cast<double>(m));

  const Vec& sz = st.aux[0];
  const Vec& sw = st.aux[1];
  const Vec agent_shift = c * (sz - sw);
  const Vec dual_shift = c * (sz + sw);
  ctx.vec_work(StepCtx::npos, sz, 4);

  std::vector<Vec> xt(m), yt(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (mask[i]) xt[i] = 0.5 * (st.z[i] + st.w[i]) + agent_shift;
    if (mask[m + i]) yt[i] = 0.5 * (st.z[i] + st.w[i]) - dual_shift;
  }

  Vec dsz = Vec::Zero(sz.size()), dsw = Vec::Zero(sz.size());
  std::size_t changed = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (!mask[i]) continue;
    st.x[i] = std::move(xt[i]);
    const ResolventOp& op = i == 0 ? pb.a() : pb.block(i - 1).op;
    const Vec r = ctx.resolve(op, 2.0 * st.x[i] - st.z[i], i, ErrorSeq::C, i);
    const Vec dz = lam * (r - st.x[i]);
    st.z[i] += dz;
    dsz += dz;
    ctx.vec_work(i, r, 6);
    ++changed;
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (!mask[m + j]) continue;
    st.y[j] = std::move(yt[j]);
    const Vec dw = -lam * st.y[j];
    st.w[j] += dw;
    dsw += dw;
    ctx.vec_work(m + j, dw, 5);
    ++changed;
  }
  st.aux[0] += dsz;
  st.aux[1] += dsw;
  st.aux_updates += changed;
  if (st.aux_updates >= kAuxRefreshFactor * p) refresh_ex13(st);
  ++st.n;
  if (opts.counters) ++opts.counters->iterations;
}

Engine::Engine(InclusionProblem problem, Framework f, EngineParams params, ErrorInjector errors)
    : problem_(std::move(problem)), framework_(f), params_(params), errors_(std::move(errors)) {
  params_.validate();
  switch (f) {
    case Framework::F1:
    case Framework::F2:
      gram_ = GramSolver::build(1.0, problem_.links());
      break;
    case Framework::F3Ex11:
      gram_ = GramSolver::build(2.0, problem_.links());
      break;
    case Framework::F3Ex12:
    case Framework::F3Ex13:
      require(problem_.all_identity_links(), to_string(f) + " requires identity links");
      break;
  }
}

EngineState Engine::initial_state(const Vec* x0) const { return make_state(framework_, problem_, x0); }

std::size_t Engine::index_count() const { return rasplit::index_count(framework_, problem_.p()); }

void Engine::step(EngineState& state, const Mask& mask, IterationCost* cost) {
  StepOptions o;
  o.params = params_;
  o.errors = errors_.active() ? &errors_ : nullptr;
  o.counters = &counters_;
  o.cost = cost;
  switch (framework_) {
    case Framework::F1: framework1_step(state, problem_, *gram_, mask, o); break;
    case Framework::F2: framework2_step(state, problem_, *gram_, mask, o); break;
    case Framework::F3Ex11: framework3_step_ex11(state, problem_, *gram_, mask, o); break;
    case Framework::F3Ex12: framework3_step_ex12(state, problem_, mask, o); break;
    case Framework::F3Ex13: framework3_step_ex13(state, problem_, mask, o); break;
  }
}

}  // namespace rasplit
