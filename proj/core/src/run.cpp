#include "rasplit/engine.hpp"

#include <chrono>
#include <cmath>
#include <limits>

namespace rasplit {

namespace {
constexpr double kFloorDb = -400.0;
}

double error_db(const Vec& x, const Vec& reference, double denom) {
  const double num = (x - reference).norm();
  if (num == 0.0) return kFloorDb;
  return std::max(kFloorDb, 20.0 * std::log10(num / denom));
}

TraceRecorder::TraceRecorder(const StopRule& stop, const Vec& x0, std::uint64_t record_every,
                             const InclusionProblem* objective_source)
    : stop_(stop), every_(std::max<std::uint64_t>(record_every, 1)), objective_source_(objective_source) {
  if (stop_.reference) {
    require_dim(static_cast<std::size_t>(stop_.reference->size()), static_cast<std::size_t>(x0.size()),
                "reference solution");
    denom_ = (x0 - *stop_.reference).norm();
    if (!(denom_ > 0.0)) {
      throw InvalidArgument("initial point coincides with the reference; normalized error is undefined");
    }
  }
  require(!stop_.target_db || stop_.reference.has_value(), "a dB target requires a reference solution");
}

double TraceRecorder::observe(std::uint64_t iter, const Vec& x, const Mask* mask, double sim_time_s,
                              double wall_time_s, bool force_record) {
  const double err = stop_.reference ? error_db(x, *stop_.reference, denom_)
                                     : std::numeric_limits<double>::quiet_NaN();
  if (force_record || iter % every_ == 0 || target_reached(err)) {
    TraceRecord r;
    r.iter = iter;
    if (mask) {
      for (std::size_t i = 0; i < mask->size(); ++i)
        if ((*mask)[i]) r.activated.push_back(static_cast<std::uint32_t>(i + 1));
    }
    r.err_db = err;
    r.sim_time_s = sim_time_s;
    r.wall_time_s = wall_time_s;
    if (objective_source_) r.objective = objective_source_->objective(x);
    records_.push_back(std::move(r));
  }
  return err;
}

bool TraceRecorder::target_reached(double err_db) const {
  return stop_.target_db.has_value() && std::isfinite(err_db) && err_db <= *stop_.target_db;
}

RunResult run(const InclusionProblem& problem, const RunOptions& opt, const StopRule& stop) {
  opt.params.validate();
  require(opt.cores >= 1, "cores must be at least 1");
  Engine engine(problem, opt.framework, opt.params, opt.errors);
  const std::size_t n_idx = engine.index_count();
  const std::size_t b = opt.block_size == 0 ? n_idx : opt.block_size;
  ActivationSchedule schedule(n_idx, b, opt.seed);

  EngineState state = engine.initial_state(opt.initial_point ? &*opt.initial_point : nullptr);
  TraceRecorder rec(stop, state.primal(), opt.record_every,
                    opt.record_objective && problem.is_minimization() ? &problem : nullptr);

  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  auto wall = [&] { return std::chrono::duration<double>(clock::now() - t0).count(); };

  double sim = 0.0;
  double err = rec.observe(0, state.primal(), nullptr, 0.0, 0.0, true);
  bool reached = rec.target_reached(err);
  IterationCost cost;
  std::uint64_t it = 0;
  while (!reached && it < stop.max_iter) {
    const Mask mask = schedule.sample();
    engine.step(state, mask, &cost);
    sim += cost.makespan(opt.cores) / kWorkUnitsPerSecond;
    ++it;
    err = rec.observe(it, state.primal(), &mask, sim, wall(), it == stop.max_iter);
    reached = rec.target_reached(err);
  }

  RunResult out;
  out.x = state.primal();
  out.trace = rec.take();
  out.counters = engine.counters();
  out.iterations = it;
  out.target_reached = reached;
  out.sim_time_s = sim;
  out.wall_time_s = wall();
  out.stored_vectors = stored_vectors(state);
  out.auxiliary_vectors = auxiliary_vectors(state);
  return out;
}

}  // namespace rasplit
