#pragma once

#include "rasplit/problem.hpp"
#include "rasplit/rng.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rasplit {

enum class Framework { F1, F2, F3Ex11, F3Ex12, F3Ex13 };

std::string to_string(Framework f);
std::optional<Framework> parse_framework(const std::string& s);

/// Number of activatable indices: p+1, p+2, 2p+1, 2p+1, 2p+2.
std::size_t index_count(Framework f, std::size_t p);
/// Number of dual blocks r of the coupled variants (p, or p+1 for averaged coupling).
std::size_t coupling_rank(Framework f, std::size_t p);
/// Stored vectors: 2p+3, 4p+5, 2p+2r+2.
std::size_t stored_vector_formula(Framework f, std::size_t p);

using Mask = std::vector<std::uint8_t>;

/// Uniform size-b subsets of {0..n-1}. Draw d depends only on (seed, d).
class ActivationSchedule {
 public:
  ActivationSchedule(std::size_t n_indices, std::size_t block_size, std::uint64_t seed);

  Mask sample();
  Mask draw(std::uint64_t d) const;

  std::size_t n_indices() const { return n_; }
  std::size_t block_size() const { return b_; }
  std::uint64_t draws() const { return next_; }

 private:
  std::size_t n_;
  std::size_t b_;
  Stream stream_;
  std::uint64_t next_ = 0;
};

/// Error sequences of the perturbed iteration: a, b (primal/dual linear
/// steps), c, d (resolvent outputs), e (Gram solve output).
enum class ErrorSeq : std::uint8_t { A = 0, B = 1, C = 2, D = 3, E = 4 };

/// Random perturbations with ||err_n|| <= c0 / (n+1)^q.
class ErrorInjector {
 public:
  enum class Mode { None, SummableGaussian };

  ErrorInjector() = default;
  static ErrorInjector summable_gaussian(double c0, double q, std::uint64_t seed);

  Mode mode() const { return mode_; }
  bool active() const { return mode_ != Mode::None; }
  double c0() const { return c0_; }
  double q() const { return q_; }
  std::uint64_t seed() const { return seed_; }
  double bound(std::uint64_t n) const;

  /// err = bound(n) * u * g / ||g||, g standard normal, u uniform on [0,1).
  Vec draw(ErrorSeq seq, std::uint64_t n, std::size_t index, std::size_t dim) const;
  void perturb(ErrorSeq seq, std::uint64_t n, std::size_t index, Vec& v) const;

 private:
  Mode mode_ = Mode::None;
  double c0_ = 0.0;
  double q_ = 2.0;
  std::uint64_t seed_ = 0;
};

/// Step size gamma > 0 and constant relaxation lambda in ]0,2[.
struct EngineParams {
  double gamma = 1.0;
  double lambda = 1.9;

  EngineParams() = default;
  EngineParams(double gamma, double lambda);
  void validate() const;
};

struct EngineCounters {
  std::uint64_t resolvent_calls = 0;
  std::uint64_t gram_solves = 0;
  std::uint64_t linop_applications = 0;
  std::uint64_t iterations = 0;
};

/// Nominal work per iteration: a shared part plus one entry per index.
struct IterationCost {
  double shared = 0.0;
  std::vector<double> per_index;
  void reset(std::size_t n);
  /// shared + makespan of the per-index work on `cores` workers (greedy LPT).
  double makespan(std::size_t cores) const;
};

/// Iterate bundle. Layout by framework:
///   F1:       x={x1}, z={z1}, y,w: p blocks in G_k, s in H
///   F2:       x,z,u,v: p+1 agents over H (+) G, s in H
///   F3 ex11:  x,z: p+1 agents over H (+) G, y,w: p blocks in G_k
///   F3 ex12:  as ex11 with G_k = H
///   F3 ex13:  x,z,y,w: p+1 agents each in H
/// `aux` caches running sums that feed the Gram right-hand side; it is not
/// part of the algorithm state and is excluded from stored_vectors().
struct EngineState {
  Framework framework = Framework::F1;
  std::vector<Vec> x, z, y, w, u, v;
  Vec s;
  std::vector<Vec> aux;
  std::uint64_t aux_updates = 0;
  std::uint64_t n = 0;

  const Vec& primal() const { return x.front(); }
};

std::size_t stored_vectors(const EngineState& s);
std::size_t auxiliary_vectors(const EngineState& s);

/// Zero initialization, or the embedding (x0, L_1 x0, ..., L_p x0) of a
/// primal point for x/z/u/v agents (duals of the coupled variants stay 0).
EngineState make_state(Framework f, const InclusionProblem& problem, const Vec* x0 = nullptr);

struct StepOptions {
  EngineParams params;
  const ErrorInjector* errors = nullptr;
  EngineCounters* counters = nullptr;
  IterationCost* cost = nullptr;
};

void framework1_step(EngineState& state, const InclusionProblem& problem, const GramSolver& gram1,
                     const Mask& mask, const StepOptions& opts);
void framework2_step(EngineState& state, const InclusionProblem& problem, const GramSolver& gram1,
                     const Mask& mask, const StepOptions& opts);
void framework3_step_ex11(EngineState& state, const InclusionProblem& problem,
                          const GramSolver& gram2, const Mask& mask, const StepOptions& opts);
void framework3_step_ex12(EngineState& state, const InclusionProblem& problem, const Mask& mask,
                          const StepOptions& opts);
void framework3_step_ex13(EngineState& state, const InclusionProblem& problem, const Mask& mask,
                          const StepOptions& opts);

/// Bundles a problem with the Gram solver its framework needs.
class Engine {
 public:
  Engine(InclusionProblem problem, Framework f, EngineParams params, ErrorInjector errors = {});

  EngineState initial_state(const Vec* x0 = nullptr) const;
  void step(EngineState& state, const Mask& mask, IterationCost* cost = nullptr);

  Framework framework() const { return framework_; }
  std::size_t index_count() const;
  const InclusionProblem& problem() const { return problem_; }
  const EngineParams& params() const { return params_; }
  const EngineCounters& counters() const { return counters_; }
  const std::optional<GramSolver>& gram() const { return gram_; }

 private:
  InclusionProblem problem_;
  Framework framework_;
  EngineParams params_;
  ErrorInjector errors_;
  std::optional<GramSolver> gram_;
  EngineCounters counters_;
};

// ---------------------------------------------------------------------------
// Runs and traces

struct TraceRecord {
  std::uint64_t iter = 0;
  std::vector<std::uint32_t> activated;  // 1-based indices
  double err_db = 0.0;
  double sim_time_s = 0.0;
  double wall_time_s = 0.0;
  std::optional<double> objective;
};

struct StopRule {
  std::uint64_t max_iter = 1000;
  std::optional<double> target_db;
  std::optional<Vec> reference;
};

struct RunOptions {
  Framework framework = Framework::F1;
  EngineParams params;
  std::size_t block_size = 0;  // 0 means all indices
  std::uint64_t seed = 0;
  ErrorInjector errors;
  std::size_t cores = 1;
  std::uint64_t record_every = 1;
  std::optional<Vec> initial_point;
  bool record_objective = false;
};

struct RunResult {
  Vec x;
  std::vector<TraceRecord> trace;
  EngineCounters counters;
  std::uint64_t iterations = 0;
  bool target_reached = false;
  double sim_time_s = 0.0;
  double wall_time_s = 0.0;
  std::size_t stored_vectors = 0;
  std::size_t auxiliary_vectors = 0;
};

/// Work units converted to simulated seconds.
inline constexpr double kWorkUnitsPerSecond = 1e9;

/// 20 log10(||x - ref|| / denom).
double error_db(const Vec& x, const Vec& reference, double denom);

/// Tracks the normalized error and trace records of a run.
class TraceRecorder {
 public:
  TraceRecorder(const StopRule& stop, const Vec& x0, std::uint64_t record_every,
                const InclusionProblem* objective_source);
  /// Returns the error in dB (NaN without a reference).
  double observe(std::uint64_t iter, const Vec& x, const Mask* mask, double sim_time_s,
                 double wall_time_s, bool force_record);
  bool target_reached(double err_db) const;
  std::vector<TraceRecord> take() { return std::move(records_); }

 private:
  const StopRule& stop_;
  double denom_ = 1.0;
  std::uint64_t every_;
  const InclusionProblem* objective_source_;
  std::vector<TraceRecord> records_;
};

RunResult run(const InclusionProblem& problem, const RunOptions& options, const StopRule& stop);

// ---------------------------------------------------------------------------
// Variational-inequality diagnostic

struct BoxSet {
  Vec lo;
  Vec hi;
  Vec project(const Vec& x) const { return x.cwiseMax(lo).cwiseMin(hi); }
};

/// max over probes y in C of -<y - x, sum_k L_k^* B_k(L_k x)>, clipped at 0.
/// Every B_k must be single-valued (ResolventOp::evaluate). Probes are the
/// exact vertex maximizer of the linear form over the box plus random points.
double vi_residual(const BoxSet& c, const InclusionProblem& problem, const Vec& x,
                   std::size_t probe_count, std::uint64_t seed = 0);

}  // namespace rasplit
