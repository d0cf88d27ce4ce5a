#pragma once

#include "rasplit/fft.hpp"
#include "rasplit/types.hpp"

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace rasplit {

/// Bounded linear map R^in_dim -> R^out_dim with forward and adjoint application.
/// Cheap to copy: descriptors are immutable and shared.
class LinearOp {
 public:
  enum class Kind { Dense, Circulant, RowBlock, Select, InnerProduct, Identity, Scaled };

  static LinearOp dense(RowMajorMat m);
  /// Periodic convolution y = k (*) x. `kernel` is the full-size grid with its
  /// origin at index 0 (row 0, column 0 for 2-D).
  static LinearOp circulant(Vec kernel, GridShape shape);
  static LinearOp circulant(Vec kernel);
  /// Rows [first, first + count) of a shared parent matrix.
  static LinearOp row_block(std::shared_ptr<const RowMajorMat> parent, std::size_t first,
                            std::size_t count);
  /// Coordinate selection x -> (x_i)_{i in indices}, 0-based.
  static LinearOp select(std::vector<std::size_t> indices, std::size_t n);
  /// x -> <x, v>, output dimension 1.
  static LinearOp inner_product(Vec v);
  static LinearOp identity(std::size_t n);
  static LinearOp scaled(const LinearOp& base, double factor);

  Kind kind() const;
  std::size_t in_dim() const;
  std::size_t out_dim() const;
  std::string describe() const;

  Vec apply(const Vec& x) const;
  Vec adjoint_apply(const Vec& y) const;

  /// Explicit out_dim x in_dim matrix.
  RowMajorMat to_dense() const;
  /// Nominal work units for one forward or adjoint application.
  double cost() const;

  // Introspection used by the Gram strategy selection. Return null/empty when
  // the kind does not match.
  const RowMajorMat* matrix() const;
  const GridShape* grid() const;
  const Vec* kernel() const;
  /// Half-spectrum DFT of the kernel (Circulant only).
  const std::vector<Complex>* multipliers() const;
  const std::vector<std::size_t>* indices() const;
  const Vec* vector() const;
  const LinearOp* base() const;
  double factor() const;

  struct Impl;

 private:
  explicit LinearOp(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
};

/// Kernel builders for periodic convolutions. All kernels are normalized to
/// unit sum and centered at grid index 0 with wrap-around.
namespace kernels {
Vec gaussian(GridShape shape, double stddev);
/// Uniform blur of `length` taps along columns of the grid (vertical).
Vec uniform_vertical(GridShape shape, std::size_t length);
/// Uniform blur of `length` taps along rows of the grid (horizontal).
Vec uniform_horizontal(GridShape shape, std::size_t length);
Vec delta(GridShape shape);
}  // namespace kernels

/// Inverse of shift*Id + sum_k L_k^* L_k, factored once at construction.
class GramSolver {
 public:
  enum class Strategy { ScaledIdentity, Spectral, Cholesky };

  static GramSolver build(double shift, std::span<const LinearOp> ops);

  Vec solve(const Vec& x) const;

  Strategy strategy() const { return strategy_; }
  double shift() const { return shift_; }
  std::size_t dim() const { return dim_; }
  double cost() const;

  /// Applies shift*Id + sum L_k^* L_k (for residual checks).
  static Vec apply_gram(double shift, std::span<const LinearOp> ops, const Vec& x);

 private:
  GramSolver() = default;
  Strategy strategy_ = Strategy::ScaledIdentity;
  double shift_ = 1.0;
  std::size_t dim_ = 0;
  double scale_ = 1.0;
  std::shared_ptr<const RealDft> dft_;
  std::shared_ptr<const std::vector<double>> inverse_multipliers_;
  struct Factor;
  std::shared_ptr<const Factor> factor_;
};

std::string to_string(GramSolver::Strategy s);

/// Orthogonal projection of (x, ys) onto the graph {(s, L_1 s, ..., L_p s)}.
struct GraphProjection {
  Vec s;
  std::vector<Vec> images;
};
GraphProjection project_graph(const GramSolver& gram1, const Vec& x, std::span<const Vec> ys,
                              std::span<const LinearOp> ops);

/// Projection used by the coupled scheme with agents x_1 in H, x_{k+1} and
/// duals y_k in G_k. Components R_1 = q, R_{1+k}, R_{p+1+k}.
struct CoupledProjection {
  Vec q;
  std::vector<Vec> agents;  // R_{1+k}, k = 1..p
  std::vector<Vec> duals;   // R_{p+1+k}, k = 1..p
};
CoupledProjection project_coupled(const GramSolver& gram2, const Vec& x1,
                                  std::span<const Vec> xs, std::span<const Vec> ys,
                                  std::span<const LinearOp> ops);

}  // namespace rasplit
