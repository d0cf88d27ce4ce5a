#include "rasplit/resolvents.hpp"

#include <cmath>

namespace rasplit {

namespace {

// Index of the bin holding frequency -k on the full grid.
std::size_t mirror(std::size_t idx, const GridShape& s) {
  const std::size_t r = idx / s.cols, c = idx % s.cols;
  return ((s.rows - r) % s.rows) * s.cols + (s.cols - c) % s.cols;
}

}  // namespace

PhaseConstraint::PhaseConstraint(GridShape shape, Vec theta)
    : shape_(shape), theta_(std::move(theta)), dft_(complex_dft(shape)) {
  require_dim(static_cast<std::size_t>(theta_.size()), shape_.size(), "PhaseConstraint theta");
  const double pi = std::acos(-1.0);
  phasor_.resize(shape_.size());
  for (std::size_t i = 0; i < shape_.size(); ++i) {
    const double t = theta_[static_cast<Eigen::Index>(i)];
    require(std::isfinite(t) && std::abs(t) <= pi + 1e-12, "phase field must lie in [-pi, pi]");
    phasor_[i] = Complex(std::cos(t), std::sin(t));
  }
  for (std::size_t i = 0; i < shape_.size(); ++i) {
    if (std::abs(phasor_[mirror(i, shape_)] - std::conj(phasor_[i])) > 1e-9) {
      throw InvalidArgument("phase field is not the phase of a real image (theta(-k) != -theta(k))");
    }
  }
}

std::vector<Complex> PhaseConstraint::spectral_projection(const std::vector<Complex>& X) const {
  // Per bin: nearest point of the ray {t e^{i theta}, t >= 0}. Modulus 0 maps to 0.
  // Bins already on the ray up to rounding are kept as they are.
  double peak = 0.0;
  for (const auto& v : X) peak = std::max(peak, std::abs(v));
  const double snap = 1e-13 * peak;
  std::vector<Complex> P(X.size());
  for (std::size_t i = 0; i < X.size(); ++i) {
    const Complex rot = X[i] * std::conj(phasor_[i]);
    if (rot.real() > 0.0 && std::abs(rot.imag()) <= snap) {
      P[i] = X[i];
      continue;
    }
    P[i] = std::max(0.0, rot.real()) * phasor_[i];
  }
  return P;
}

Vec PhaseConstraint::to_real(const std::vector<Complex>& spectrum) const {
  std::vector<Complex> sym(spectrum.size());
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    sym[i] = 0.5 * (spectrum[i] + std::conj(spectrum[mirror(i, shape_)]));
  }
  const auto z = dft_->inverse(sym);
  Vec out(static_cast<Eigen::Index>(z.size()));
  double max_re = 0.0, max_im = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] = z[i].real();
    max_re = std::max(max_re, std::abs(z[i].real()));
    max_im = std::max(max_im, std::abs(z[i].imag()));
  }
  if (max_im > 1e-9 * std::max(1.0, max_re)) {
    throw NumericalError("phase projection: imaginary residue " + std::to_string(max_im) +
                         " exceeds tolerance");
  }
  return out;
}

namespace {
std::vector<Complex> complexify(const Vec& x) {
  std::vector<Complex> z(static_cast<std::size_t>(x.size()));
  for (Eigen::Index i = 0; i < x.size(); ++i) z[static_cast<std::size_t>(i)] = x[i];
  return z;
}
}  // namespace

Vec PhaseConstraint::project(const Vec& x) const {
  require_dim(static_cast<std::size_t>(x.size()), shape_.size(), "PhaseConstraint::project");
  return to_real(spectral_projection(dft_->forward(complexify(x))));
}

Vec PhaseConstraint::residual(const Vec& x) const {
  require_dim(static_cast<std::size_t>(x.size()), shape_.size(), "PhaseConstraint::residual");
  auto X = dft_->forward(complexify(x));
  const auto P = spectral_projection(X);
  for (std::size_t i = 0; i < X.size(); ++i) X[i] -= P[i];
  return to_real(X);
}

Vec PhaseConstraint::resolve(double gamma, const Vec& y) const {
  require(gamma > 0.0, "resolvent_phase: gamma must be positive");
  return (y + gamma * project(y)) / (1.0 + gamma);
}

Vec PhaseConstraint::phase_of(GridShape shape, const Vec& x) {
  // Half spectrum from a real transform, mirrored, so theta(-k) = -theta(k) exactly.
  auto dft = real_dft(shape);
  const auto half = dft->forward(x);
  const std::size_t hc = shape.cols / 2 + 1;
  auto full = [&](std::size_t r, std::size_t c) {
    if (c < hc) return half[r * hc + c];
    return std::conj(half[((shape.rows - r) % shape.rows) * hc + (shape.cols - c)]);
  };
  Vec theta(static_cast<Eigen::Index>(shape.size()));
  for (std::size_t i = 0; i < shape.size(); ++i) {
    const std::size_t m = mirror(i, shape);
    theta[static_cast<Eigen::Index>(i)] =
        m < i ? -theta[static_cast<Eigen::Index>(m)] : std::arg(full(i / shape.cols, i % shape.cols));
  }
  // Self-conjugate bins hold real values; keep their phase exactly 0 or pi.
  const double pi = std::acos(-1.0);
  for (std::size_t r = 0; r < shape.rows; ++r) {
    for (std::size_t c = 0; c < shape.cols; ++c) {
      const std::size_t i = r * shape.cols + c;
      if (mirror(i, shape) == i) {
        auto& t = theta[static_cast<Eigen::Index>(i)];
        t = std::abs(t) > pi / 2 ? pi : 0.0;
      }
    }
  }
  return theta;
}

Vec phase_residual_op(const PhaseConstraint& c, const Vec& x) { return c.residual(x); }
Vec resolvent_phase(double gamma, const PhaseConstraint& c, const Vec& y) { return c.resolve(gamma, y); }

}  // namespace rasplit
