#include "rasplit/resolvents.hpp"

#include <cmath>
#include <limits>
#include <variant>

namespace rasplit {

namespace {

void check_gamma(double gamma, const char* who) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw InvalidArgument(std::string(who) + ": gamma must be positive and finite");
  }
}

}  // namespace

Vec prox_norm(double gamma, const Vec& x) {
  check_gamma(gamma, "prox_norm");
  const double n = x.norm();
  if (n <= gamma) return Vec::Zero(x.size());
  return (1.0 - gamma / n) * x;
}

Vec prox_dist_interval(double gamma, const Vec& lo, const Vec& hi, const Vec& x) {
  check_gamma(gamma, "prox_dist_interval");
  require_dim(static_cast<std::size_t>(lo.size()), static_cast<std::size_t>(x.size()), "prox_dist_interval lo");
  require_dim(static_cast<std::size_t>(hi.size()), static_cast<std::size_t>(x.size()), "prox_dist_interval hi");
  Vec out(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    if (lo[j] > hi[j]) throw InvalidArgument("prox_dist_interval: lo > hi");
    const double v = x[j];
    if (v > hi[j]) out[j] = v - hi[j] <= gamma ? hi[j] : v - gamma;
    else if (v < lo[j]) out[j] = lo[j] - v <= gamma ? lo[j] : v + gamma;
    else out[j] = v;
  }
  return out;
}

Vec prox_hinge(double gamma, double xi, const Vec& u, const Vec& x) {
  check_gamma(gamma, "prox_hinge");
  require(xi == 1.0 || xi == -1.0, "prox_hinge: label must be +1 or -1");
  require_dim(static_cast<std::size_t>(u.size()), static_cast<std::size_t>(x.size()), "prox_hinge feature");
  const double uu = u.squaredNorm();
  require(uu > 0.0, "prox_hinge: feature must be nonzero");
  const double s = xi * x.dot(u);
  if (s >= 1.0) return x;
  if (s <= 1.0 - gamma * uu) return x + (gamma * xi) * u;
  return x + ((1.0 - s) / uu * xi) * u;
}

Vec resolvent_hard_clip(double gamma, const Vec& r, double clip_hi, const Vec& x) {
  check_gamma(gamma, "resolvent_hard_clip");
  require_dim(static_cast<std::size_t>(r.size()), static_cast<std::size_t>(x.size()), "resolvent_hard_clip data");
  Vec out(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double eta = x[j] + gamma * r[j];
    out[j] = eta - gamma * std::min(std::max(0.0, eta / (1.0 + gamma)), clip_hi);
  }
  return out;
}

double soft_clip(double level, double t) { return t > 0.0 ? level * t / (level + t) : 0.0; }

Vec resolvent_soft_clip(double gamma, double level, const Vec& x) {
  check_gamma(gamma, "resolvent_soft_clip");
  require(level > 0.0, "resolvent_soft_clip: level must be positive");
  Vec out(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double eta = x[j];
    if (eta < 0.0) {
      out[j] = eta;
      continue;
    }
    // Positive root of z^2 + (c(1+gamma) - eta) z - c eta = 0.
    const double b = eta - level * (1.0 + gamma);
    const double disc = std::sqrt(b * b + 4.0 * level * eta);
    // Cancellation-free form when b < 0.
    out[j] = b >= 0.0 ? 0.5 * (b + disc) : (2.0 * level * eta) / (disc - b);
  }
  return out;
}

double resolvent_mean_constraint(double gamma, double target, double x) {
  check_gamma(gamma, "resolvent_mean_constraint");
  return (x + gamma * target) / (1.0 + gamma);
}

Vec prox_conjugate(double gamma, const std::function<Vec(double, const Vec&)>& prox_f, const Vec& y) {
  check_gamma(gamma, "prox_conjugate");
  return y - gamma * prox_f(1.0 / gamma, y / gamma);
}

namespace {

struct ZeroK {};
struct NormK {};
struct IntervalK {
  Vec lo, hi;
};
struct QuadraticK {
  double alpha;
  Vec center;
};
struct HingeK {
  double xi;
  Vec u;
};
struct BoxK {
  Vec lo, hi;
};
struct HardClipK {
  Vec r;
  double c;
};
struct SoftClipK {
  Vec r;
  double level;
};
struct MeanK {
  double target;
};
struct PhaseK {
  std::shared_ptr<const PhaseConstraint> c;
};
struct PointK {
  Vec point;
};
struct CustomK {
  ResolventOp::CustomFn fn;
  std::string name;
};

}  // namespace

struct ResolventOp::Impl {
  std::variant<ZeroK, NormK, IntervalK, QuadraticK, HingeK, BoxK, HardClipK, SoftClipK, MeanK,
               PhaseK, PointK, CustomK>
      data;
  std::size_t dim = 0;
  double weight = 1.0;
};

ResolventOp::ResolventOp(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

namespace {
template <class T>
std::shared_ptr<const ResolventOp::Impl> make(T data, std::size_t dim, double weight) {
  require(dim > 0, "resolvent operator dimension must be positive");
  require(weight > 0.0 && std::isfinite(weight), "resolvent operator weight must be positive");
  auto impl = std::make_shared<ResolventOp::Impl>();
  impl->data = std::move(data);
  impl->dim = dim;
  impl->weight = weight;
  return impl;
}
std::size_t sz(const Vec& v) { return static_cast<std::size_t>(v.size()); }
}  // namespace

ResolventOp ResolventOp::zero(std::size_t dim) { return ResolventOp(make(ZeroK{}, dim, 1.0)); }
ResolventOp ResolventOp::norm(std::size_t dim, double weight) { return ResolventOp(make(NormK{}, dim, weight)); }

ResolventOp ResolventOp::dist_interval(Vec lo, Vec hi, double weight) {
  require_dim(sz(hi), sz(lo), "dist_interval bounds");
  require(((lo.array() <= hi.array())).all(), "dist_interval: lo > hi");
  const auto n = sz(lo);
  return ResolventOp(make(IntervalK{std::move(lo), std::move(hi)}, n, weight));
}

ResolventOp ResolventOp::quadratic(double alpha, Vec center) {
  require(alpha > 0.0 && std::isfinite(alpha), "quadratic: alpha must be positive");
  const auto n = sz(center);
  return ResolventOp(make(QuadraticK{alpha, std::move(center)}, n, 1.0));
}

ResolventOp ResolventOp::hinge(double xi, Vec feature, double weight) {
  require(xi == 1.0 || xi == -1.0, "hinge: label must be +1 or -1");
  require(feature.squaredNorm() > 0.0, "hinge: feature must be nonzero");
  const auto n = sz(feature);
  return ResolventOp(make(HingeK{xi, std::move(feature)}, n, weight));
}

ResolventOp ResolventOp::box(Vec lo, Vec hi) {
  require_dim(sz(hi), sz(lo), "box bounds");
  require(((lo.array() <= hi.array())).all(), "box: lo > hi");
  const auto n = sz(lo);
  return ResolventOp(make(BoxK{std::move(lo), std::move(hi)}, n, 1.0));
}

ResolventOp ResolventOp::box(std::size_t dim, double lo, double hi) {
  return box(Vec::Constant(static_cast<Eigen::Index>(dim), lo), Vec::Constant(static_cast<Eigen::Index>(dim), hi));
}

ResolventOp ResolventOp::hard_clip(Vec data, double clip_hi, double weight) {
  require(clip_hi >= 0.0, "hard_clip: clip level must be nonnegative");
  const auto n = sz(data);
  return ResolventOp(make(HardClipK{std::move(data), clip_hi}, n, weight));
}

ResolventOp ResolventOp::soft_clip(Vec data, double level, double weight) {
  require(level > 0.0, "soft_clip: level must be positive");
  const auto n = sz(data);
  return ResolventOp(make(SoftClipK{std::move(data), level}, n, weight));
}

ResolventOp ResolventOp::mean_constraint(double target, double weight) {
  return ResolventOp(make(MeanK{target}, 1, weight));
}

ResolventOp ResolventOp::phase(std::shared_ptr<const PhaseConstraint> c, double weight) {
  require(c != nullptr, "phase: null constraint");
  const auto n = c->shape().size();
  return ResolventOp(make(PhaseK{std::move(c)}, n, weight));
}

ResolventOp ResolventOp::indicator_point(Vec point) {
  const auto n = sz(point);
  return ResolventOp(make(PointK{std::move(point)}, n, 1.0));
}

ResolventOp ResolventOp::custom(std::size_t dim, CustomFn fn, std::string name) {
  require(static_cast<bool>(fn), "custom: empty resolvent function");
  return ResolventOp(make(CustomK{std::move(fn), std::move(name)}, dim, 1.0));
}

ResolventOp::Kind ResolventOp::kind() const { return static_cast<Kind>(impl_->data.index()); }
std::size_t ResolventOp::dim() const { return impl_->dim; }
double ResolventOp::weight() const { return impl_->weight; }

std::string ResolventOp::name() const {
  if (auto* c = std::get_if<CustomK>(&impl_->data)) return c->name;
  return to_string(kind());
}

Vec ResolventOp::resolve(double gamma, const Vec& x) const {
  check_gamma(gamma, "resolve");
  if (sz(x) != impl_->dim) {
    throw DimensionError(name() + ".resolve: input length " + std::to_string(x.size()) +
                         ", expected " + std::to_string(impl_->dim));
  }
  const double g = gamma * impl_->weight;
  return std::visit(
      [&](const auto& d) -> Vec {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, ZeroK>) return x;
        else if constexpr (std::is_same_v<T, NormK>) return prox_norm(g, x);
        else if constexpr (std::is_same_v<T, IntervalK>) return prox_dist_interval(g, d.lo, d.hi, x);
        else if constexpr (std::is_same_v<T, QuadraticK>) return (x + (g * d.alpha) * d.center) / (1.0 + g * d.alpha);
        else if constexpr (std::is_same_v<T, HingeK>) return prox_hinge(g, d.xi, d.u, x);
        else if constexpr (std::is_same_v<T, BoxK>) return x.cwiseMax(d.lo).cwiseMin(d.hi);
        else if constexpr (std::is_same_v<T, HardClipK>) return resolvent_hard_clip(g, d.r, d.c, x);
        else if constexpr (std::is_same_v<T, SoftClipK>) return resolvent_soft_clip(g, d.level, x + g * d.r);
        else if constexpr (std::is_same_v<T, MeanK>) {
          Vec out(1);
          out[0] = resolvent_mean_constraint(g, d.target, x[0]);
          return out;
        } else if constexpr (std::is_same_v<T, PhaseK>) return d.c->resolve(g, x);
        else if constexpr (std::is_same_v<T, PointK>) return d.point;
        else {
          Vec out = d.fn(g, x);
          require_dim(sz(out), impl_->dim, name() + " output");
          return out;
        }
      },
      impl_->data);
}

bool ResolventOp::is_subdifferential() const {
  switch (kind()) {
    case Kind::Zero:
    case Kind::ProxNorm:
    case Kind::ProxDistInterval:
    case Kind::ProxQuadratic:
    case Kind::ProxHinge:
    case Kind::ProjBox:
    case Kind::ProxIndicatorPoint:
    case Kind::ResMeanConstraint:
    case Kind::ResHardClip:
      return true;
    default:
      return false;
  }
}

std::optional<double> ResolventOp::value(const Vec& x) const {
  require_dim(sz(x), impl_->dim, name() + ".value");
  const double w = impl_->weight;
  const double inf = std::numeric_limits<double>::infinity();
  return std::visit(
      [&](const auto& d) -> std::optional<double> {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, ZeroK>) return 0.0;
        else if constexpr (std::is_same_v<T, NormK>) return w * x.norm();
        else if constexpr (std::is_same_v<T, IntervalK>) {
          const Vec excess = (x - d.hi).cwiseMax(0.0) + (d.lo - x).cwiseMax(0.0);
          return w * excess.sum();
        } else if constexpr (std::is_same_v<T, QuadraticK>) return 0.5 * d.alpha * (x - d.center).squaredNorm();
        else if constexpr (std::is_same_v<T, HingeK>) return w * std::max(0.0, 1.0 - d.xi * x.dot(d.u));
        else if constexpr (std::is_same_v<T, BoxK>)
          return ((x.array() >= d.lo.array()) && (x.array() <= d.hi.array())).all() ? 0.0 : inf;
        else if constexpr (std::is_same_v<T, PointK>) return x == d.point ? 0.0 : inf;
        else if constexpr (std::is_same_v<T, MeanK>) return 0.5 * w * (x[0] - d.target) * (x[0] - d.target);
        else if constexpr (std::is_same_v<T, HardClipK>) {
          // Antiderivative of P_[0,c](t) - r.
          double s = 0.0;
          for (Eigen::Index j = 0; j < x.size(); ++j) {
            const double t = x[j];
            double prim = 0.0;
            if (t > 0.0) prim = t <= d.c ? 0.5 * t * t : 0.5 * d.c * d.c + d.c * (t - d.c);
            s += prim - d.r[j] * t;
          }
          return w * s;
        } else return std::nullopt;
      },
      impl_->data);
}

std::optional<std::pair<double, Vec>> ResolventOp::quadratic_params() const {
  if (const auto* q = std::get_if<QuadraticK>(&impl_->data)) return std::make_pair(q->alpha, q->center);
  return std::nullopt;
}

bool ResolventOp::real_valued() const {
  switch (kind()) {
    case Kind::Zero:
    case Kind::ProxNorm:
    case Kind::ProxDistInterval:
    case Kind::ProxQuadratic:
    case Kind::ProxHinge:
    case Kind::ResMeanConstraint:
    case Kind::ResHardClip:
      return true;
    default:
      return false;
  }
}

bool ResolventOp::nonnegative() const {
  switch (kind()) {
    case Kind::Zero:
    case Kind::ProxNorm:
    case Kind::ProxDistInterval:
    case Kind::ProxQuadratic:
    case Kind::ProxHinge:
    case Kind::ProjBox:
    case Kind::ProxIndicatorPoint:
    case Kind::ResMeanConstraint:
      return true;
    default:
      return false;
  }
}

std::optional<Vec> ResolventOp::evaluate(const Vec& x) const {
  require_dim(sz(x), impl_->dim, name() + ".evaluate");
  const double w = impl_->weight;
  return std::visit(
      [&](const auto& d) -> std::optional<Vec> {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, ZeroK>) return Vec::Zero(x.size());
        else if constexpr (std::is_same_v<T, QuadraticK>) return d.alpha * (x - d.center);
        else if constexpr (std::is_same_v<T, HardClipK>) return w * (x.cwiseMax(0.0).cwiseMin(d.c) - d.r);
        else if constexpr (std::is_same_v<T, SoftClipK>) {
          Vec out(x.size());
          for (Eigen::Index j = 0; j < x.size(); ++j) out[j] = rasplit::soft_clip(d.level, x[j]) - d.r[j];
          return w * out;
        } else if constexpr (std::is_same_v<T, MeanK>) {
          Vec out(1);
          out[0] = w * (x[0] - d.target);
          return out;
        } else if constexpr (std::is_same_v<T, PhaseK>) return w * d.c->residual(x);
        else return std::nullopt;
      },
      impl_->data);
}

double ResolventOp::cost() const {
  const double n = static_cast<double>(impl_->dim);
  switch (kind()) {
    case Kind::Zero: return 0.0;
    case Kind::ProxNorm: return 3.0 * n;
    case Kind::ProxDistInterval: return 4.0 * n;
    case Kind::ProxQuadratic: return 3.0 * n;
    case Kind::ProxHinge: return 4.0 * n;
    case Kind::ProjBox: return 2.0 * n;
    case Kind::ResHardClip: return 5.0 * n;
    case Kind::ResSoftClip: return 10.0 * n;
    case Kind::ResMeanConstraint: return 3.0;
    case Kind::ResPhase: return 10.0 * n * std::log2(std::max(2.0, n)) + 16.0 * n;
    case Kind::ProxIndicatorPoint: return n;
    case Kind::Custom: return 10.0 * n;
  }
  return n;
}

std::string to_string(ResolventOp::Kind k) {
  switch (k) {
    case ResolventOp::Kind::Zero: return "Zero";
    case ResolventOp::Kind::ProxNorm: return "ProxNorm";
    case ResolventOp::Kind::ProxDistInterval: return "ProxDistInterval";
    case ResolventOp::Kind::ProxQuadratic: return "ProxQuadratic";
    case ResolventOp::Kind::ProxHinge: return "ProxHinge";
    case ResolventOp::Kind::ProjBox: return "ProjBox";
    case ResolventOp::Kind::ResHardClip: return "ResHardClip";
    case ResolventOp::Kind::ResSoftClip: return "ResSoftClip";
    case ResolventOp::Kind::ResMeanConstraint: return "ResMeanConstraint";
    case ResolventOp::Kind::ResPhase: return "ResPhase";
    case ResolventOp::Kind::ProxIndicatorPoint: return "ProxIndicatorPoint";
    case ResolventOp::Kind::Custom: return "Custom";
  }
  return "?";
}

Vec inverse_resolvent(double gamma, const ResolventOp& b, const Vec& y) {
  check_gamma(gamma, "inverse_resolvent");
  return y - gamma * b.resolve(1.0 / gamma, y / gamma);
}

}  // namespace rasplit
