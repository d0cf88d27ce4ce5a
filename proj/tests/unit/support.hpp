#pragma once

#include "rasplit/rng.hpp"
#include "rasplit/types.hpp"

#include <Eigen/Dense>

#include <functional>

namespace rasplit::testing {

inline Vec randn(Stream& s, std::size_t n, double scale = 1.0) {
  Vec v(static_cast<Eigen::Index>(n));
  for (auto& x : v) x = scale * s.normal();
  return v;
}

inline Eigen::MatrixXd randn_mat(Stream& s, std::size_t rows, std::size_t cols) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = s.normal();
  return m;
}

/// Dense periodic convolution matrix built entry by entry from the kernel.
inline Eigen::MatrixXd circulant_matrix(const Vec& kernel, std::size_t rows, std::size_t cols) {
  const auto n = static_cast<Eigen::Index>(rows * cols);
  Eigen::MatrixXd c(n, n);
  for (std::size_t r1 = 0; r1 < rows; ++r1)
    for (std::size_t c1 = 0; c1 < cols; ++c1)
      for (std::size_t r2 = 0; r2 < rows; ++r2)
        for (std::size_t c2 = 0; c2 < cols; ++c2) {
          const std::size_t dr = (r1 + rows - r2) % rows, dc = (c1 + cols - c2) % cols;
          c(static_cast<Eigen::Index>(r1 * cols + c1), static_cast<Eigen::Index>(r2 * cols + c2)) =
              kernel[static_cast<Eigen::Index>(dr * cols + dc)];
        }
  return c;
}

/// Matrix of a linear map probed on the standard basis.
inline Eigen::MatrixXd probe(std::size_t n, const std::function<Vec(const Vec&)>& f) {
  Eigen::MatrixXd m;
  for (std::size_t j = 0; j < n; ++j) {
    Vec e = Vec::Zero(static_cast<Eigen::Index>(n));
    e[static_cast<Eigen::Index>(j)] = 1.0;
    const Vec col = f(e);
    if (j == 0) m.resize(col.size(), static_cast<Eigen::Index>(n));
    m.col(static_cast<Eigen::Index>(j)) = col;
  }
  return m;
}

/// Orthogonal projector onto the null space of c.
inline Eigen::MatrixXd null_space_projector(const Eigen::MatrixXd& c) {
  const Eigen::MatrixXd cct = c * c.transpose();
  return Eigen::MatrixXd::Identity(c.cols(), c.cols()) - c.transpose() * cct.ldlt().solve(c);
}

/// Random search plus coordinate polish for min_z phi(z), started at `start`.
/// Returns the best value found.
inline double search_min(const std::function<double(const Vec&)>& phi, const Vec& start, Stream& s,
                         std::size_t candidates = 10000) {
  Vec best = start;
  double fbest = phi(best);
  for (std::size_t t = 0; t < candidates; ++t) {
    const double radius = std::pow(10.0, s.uniform(-6.0, 1.0));
    Vec c = start + radius * randn(s, static_cast<std::size_t>(start.size()));
    const double fc = phi(c);
    if (fc < fbest) {
      fbest = fc;
      best = c;
    }
  }
  for (double h = 1.0; h > 1e-10; h *= 0.5) {
    bool moved = true;
    while (moved) {
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

}  // namespace rasplit::testing
