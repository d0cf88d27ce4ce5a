#pragma once

#include "rasplit/fft.hpp"
#include "rasplit/types.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>

namespace rasplit {

// Closed-form maps. gamma > 0 throughout.

/// prox of gamma*||.||: block soft threshold.
Vec prox_norm(double gamma, const Vec& x);
/// prox of gamma * sum_j d_[lo_j, hi_j](x_j).
Vec prox_dist_interval(double gamma, const Vec& lo, const Vec& hi, const Vec& x);
/// prox of gamma * max{0, 1 - xi <x, u>}.
Vec prox_hinge(double gamma, double xi, const Vec& u, const Vec& x);
/// Resolvent of gamma*(P_[0,clip_hi] - r), per coordinate.
Vec resolvent_hard_clip(double gamma, const Vec& r, double clip_hi, const Vec& x);
/// Resolvent of gamma*F with F(t) = level*max{0,t}/(level+|t|), per coordinate.
Vec resolvent_soft_clip(double gamma, double level, const Vec& x);
double resolvent_mean_constraint(double gamma, double target, double x);
/// prox of gamma f^* via prox of f: y - gamma prox_{f/gamma}(y/gamma).
Vec prox_conjugate(double gamma, const std::function<Vec(double, const Vec&)>& prox_f,
                   const Vec& y);

/// Soft-clip response F(t) = level*max{0,t}/(level+|t|).
double soft_clip(double level, double t);

/// Closed convex cone of real images whose DFT has prescribed phase theta
/// (up to nonnegative modulus). Projection, residual F = Id - P, and resolvent.
class PhaseConstraint {
 public:
  PhaseConstraint(GridShape shape, Vec theta);

  const GridShape& shape() const { return shape_; }
  const Vec& theta() const { return theta_; }

  Vec project(const Vec& x) const;
  /// F(x) = x - P(x).
  Vec residual(const Vec& x) const;
  /// (y + gamma P(y)) / (1 + gamma).
  Vec resolve(double gamma, const Vec& y) const;

  /// Phase field of the DFT of a real image, in [-pi, pi].
  static Vec phase_of(GridShape shape, const Vec& x);

 private:
  std::vector<Complex> spectral_projection(const std::vector<Complex>& X) const;
  Vec to_real(const std::vector<Complex>& spectrum) const;
  GridShape shape_;
  Vec theta_;
  std::vector<Complex> phasor_;
  std::shared_ptr<const ComplexDft> dft_;
};

Vec phase_residual_op(const PhaseConstraint& c, const Vec& x);
Vec resolvent_phase(double gamma, const PhaseConstraint& c, const Vec& y);

/// Maximally monotone operator accessed through its resolvent. `weight`
/// scales the operator: resolve(gamma, x) = J_{gamma*weight*A}(x).
class ResolventOp {
 public:
  enum class Kind {
    Zero,
    ProxNorm,
    ProxDistInterval,
    ProxQuadratic,
    ProxHinge,
    ProjBox,
    ResHardClip,
    ResSoftClip,
    ResMeanConstraint,
    ResPhase,
    ProxIndicatorPoint,
    Custom
  };
  using CustomFn = std::function<Vec(double gamma, const Vec& x)>;

  /// A = 0, resolvent is the identity.
  static ResolventOp zero(std::size_t dim);
  static ResolventOp norm(std::size_t dim, double weight = 1.0);
  static ResolventOp dist_interval(Vec lo, Vec hi, double weight = 1.0);
  /// f = alpha/2 ||x - center||^2.
  static ResolventOp quadratic(double alpha, Vec center);
  static ResolventOp hinge(double xi, Vec feature, double weight = 1.0);
  static ResolventOp box(Vec lo, Vec hi);
  static ResolventOp box(std::size_t dim, double lo, double hi);
  /// B = weight * (P_[0,clip_hi] - data).
  static ResolventOp hard_clip(Vec data, double clip_hi, double weight = 1.0);
  /// B = weight * (F_level - data).
  static ResolventOp soft_clip(Vec data, double level, double weight = 1.0);
  /// B = weight * (Id - target) on R.
  static ResolventOp mean_constraint(double target, double weight = 1.0);
  /// B = weight * (Id - P_C) for the phase cone C.
  static ResolventOp phase(std::shared_ptr<const PhaseConstraint> c, double weight = 1.0);
  /// Normal cone of {point}; resolvent returns the point.
  static ResolventOp indicator_point(Vec point);
  static ResolventOp custom(std::size_t dim, CustomFn fn, std::string name);

  Kind kind() const;
  std::size_t dim() const;
  std::string name() const;
  double weight() const;

  Vec resolve(double gamma, const Vec& x) const;

  /// True when the operator is the subdifferential of a known function.
  bool is_subdifferential() const;
  /// f(x) for subdifferential kinds (may be +inf for indicators).
  std::optional<double> value(const Vec& x) const;
  /// B(x) for kinds that are single-valued everywhere.
  std::optional<Vec> evaluate(const Vec& x) const;

  /// (alpha, center) of a quadratic.
  std::optional<std::pair<double, Vec>> quadratic_params() const;
  /// The function is finite everywhere.
  bool real_valued() const;
  /// The function is nonnegative everywhere.
  bool nonnegative() const;

  /// Nominal work units for one resolvent evaluation.
  double cost() const;

  struct Impl;

 private:
  explicit ResolventOp(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
};

std::string to_string(ResolventOp::Kind k);

/// J_{gamma B^{-1}}(y) = y - gamma J_{B/gamma}(y/gamma).
Vec inverse_resolvent(double gamma, const ResolventOp& b, const Vec& y);

}  // namespace rasplit
