#include "rasplit/problems.hpp"

#include <cmath>
#include <sstream>

namespace rasplit {

namespace {

// Sum of squared norms over the governing sequences (z, w) of Framework 1.
double state_sq(const EngineState& s) {
  double t = 0.0;
  for (const auto& v : s.z) t += v.squaredNorm();
  for (const auto& v : s.w) t += v.squaredNorm();
  return t;
}

double diff_sq(const EngineState& a, const EngineState& b) {
  double t = 0.0;
  for (std::size_t i = 0; i < a.z.size(); ++i) t += (a.z[i] - b.z[i]).squaredNorm();
  for (std::size_t i = 0; i < a.w.size(); ++i) t += (a.w[i] - b.w[i]).squaredNorm();
  return t;
}

double to_db(double ratio) { return ratio == 0.0 ? -400.0 : 20.0 * std::log10(ratio); }

}  // namespace

ReferenceResult reference_solution(const InclusionProblem& problem, const ReferenceOptions& opt) {
  require(opt.tol_db <= -120.0, "reference_solution: tol_db must be at most -120");
  require(opt.max_iter >= 1, "reference_solution: max_iter must be positive");
  Engine engine(problem, Framework::F1, EngineParams{1.0, 1.9});
  EngineState state = engine.initial_state(opt.initial_point ? &*opt.initial_point : nullptr);
  const Mask all(engine.index_count(), 1);
  const double tol = std::pow(10.0, opt.tol_db / 20.0);

  // Converged when both the primal iterate and the (z, w) sequence stall.
  double change = 1.0;
  for (std::uint64_t it = 1; it <= opt.max_iter; ++it) {
    const EngineState prev = state;
    engine.step(state, all);
    const double xn = state.primal().norm();
    const double dx = (state.primal() - prev.primal()).norm();
    const double sn = std::sqrt(state_sq(state));
    const double ds = std::sqrt(diff_sq(state, prev));
    const double rx = xn > 0.0 ? dx / xn : dx;
    const double rs = sn > 0.0 ? ds / sn : ds;
    change = std::max(rx, rs);
    if (change <= tol) return ReferenceResult{state.primal(), it, to_db(change)};
  }
  std::ostringstream msg;
  msg << "reference solution did not reach " << opt.tol_db << " dB within " << opt.max_iter
      << " iterations (last relative change " << to_db(change) << " dB)";
  throw ReferenceNotConverged(state.primal(), to_db(change), msg.str());
}

}  // namespace rasplit
