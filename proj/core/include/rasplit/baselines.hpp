#pragma once

#include "rasplit/engine.hpp"

#include <span>
#include <vector>

namespace rasplit {

/// ||L|| by power iteration on L^* L.
double operator_norm(const LinearOp& op, std::size_t max_iter = 200, double tol = 1e-8,
                     std::uint64_t seed = 0);
/// Norm of the stacked map x -> (L_1 x, ..., L_p x), via power iteration on sum L_k^* L_k.
double stacked_operator_norm(std::span<const LinearOp> ops, std::size_t max_iter = 200,
                             double tol = 1e-8, std::uint64_t seed = 0);

// ---------------------------------------------------------------------------
// Adaptive stochastic primal-dual method (one dual block per iteration).

struct AdaptivePDParams {
  double tau0 = 0.0;
  double sigma0 = 0.0;
  double chi0 = 0.5;
  double eta = 0.5;
  double delta = 1.5;
  std::vector<double> probabilities;
  std::vector<double> block_norms;
  double stacked_norm = 0.0;

  /// tau0 = 0.9/sqrt(p), sigma0 = 1/(sqrt(p) max ||L_k||^2), pi_k = 1/p.
  static AdaptivePDParams defaults(const InclusionProblem& problem);
  /// Throws unless tau0 sigma0 max ||L_k||^2 / pi_k < 1 and the constants are in range.
  void validate() const;
};

struct AdaptivePDState {
  Vec x;
  std::vector<Vec> y;
  std::vector<Vec> z;
  double tau = 0.0;
  double sigma = 0.0;
  double chi = 0.0;
  double rho = 0.0;
  double nu = 0.0;
  std::uint64_t n = 0;
  Vec aggregate;  // sum_k L_k^* z_k
  long extrapolated = -1;  // the only block whose z may differ from y
};

AdaptivePDState make_adaptive_pd_state(const InclusionProblem& problem, const AdaptivePDParams& params,
                                       const Vec* x0 = nullptr);

/// One iteration with sampled block k (0-based).
void adaptive_pd_step(AdaptivePDState& state, const InclusionProblem& problem,
                      const AdaptivePDParams& params, std::size_t k,
                      EngineCounters* counters = nullptr, IterationCost* cost = nullptr);

// ---------------------------------------------------------------------------
// Random block-coordinate forward-backward method with W = w Id, U_k = u_k Id.

struct RBCFBParams {
  double w = 0.0;
  std::vector<double> u;
  double lambda = 1.0;
  std::vector<double> block_norms;

  /// tau = 1/sqrt(2p), w = 0.9 tau, u_k = tau / ||L_k||^2, lambda = 1.
  static RBCFBParams defaults(const InclusionProblem& problem);
  /// sum_k u_k w ||L_k||^2.
  double condition_value() const;
  /// Throws unless condition_value() < 1/2 and lambda in ]0,1].
  void validate() const;
};

struct RBCFBState {
  Vec x;
  std::vector<Vec> v;
  Vec aggregate;  // sum_k L_k^* v_k
  std::uint64_t n = 0;
};

RBCFBState make_rbcfb_state(const InclusionProblem& problem, const Vec* x0 = nullptr);

void rbc_fb_step(RBCFBState& state, const InclusionProblem& problem, const RBCFBParams& params,
                 const Mask& mask, const ErrorInjector* errors = nullptr,
                 EngineCounters* counters = nullptr, IterationCost* cost = nullptr);

/// Runs with the same trace conventions as the frameworks. options.framework
/// and options.params are ignored; the baselines use their own constants.
RunResult run_adaptive_pd(const InclusionProblem& problem, const RunOptions& options,
                          const StopRule& stop);
RunResult run_rbcfb(const InclusionProblem& problem, const RunOptions& options, const StopRule& stop);

}  // namespace rasplit
