#include "rasplit/linops.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <optional>

namespace rasplit {

struct GramSolver::Factor {
  Eigen::LLT<Eigen::MatrixXd> llt;
};

namespace {

// Sum of squared factors if op is a (scaled) identity.
std::optional<double> identity_weight(const LinearOp& op) {
  if (op.kind() == LinearOp::Kind::Identity) return 1.0;
  if (op.kind() == LinearOp::Kind::Scaled) {
    auto w = identity_weight(*op.base());
    if (w) return op.factor() * op.factor() * *w;
  }
  return std::nullopt;
}

const GridShape* find_grid(const LinearOp& op) {
  if (op.kind() == LinearOp::Kind::Circulant) return op.grid();
  if (op.kind() == LinearOp::Kind::Scaled) return find_grid(*op.base());
  return nullptr;
}

// Adds the DFT eigenvalues of op^* op to `acc` (half-spectrum of `shape`).
// Returns false when op^* op is not diagonalized by that DFT.
bool add_spectral(const LinearOp& op, const GridShape& shape, double weight,
                  std::vector<double>& acc) {
  switch (op.kind()) {
    case LinearOp::Kind::Identity:
      for (auto& a : acc) a += weight;
      return true;
    case LinearOp::Kind::Circulant: {
      if (!(*op.grid() == shape)) return false;
      const auto& m = *op.multipliers();
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += weight * std::norm(m[i]);
      return true;
    }
    case LinearOp::Kind::InnerProduct: {
      const Vec& v = *op.vector();
      if ((v.array() != v[0]).any()) return false;
      acc[0] += weight * static_cast<double>(v.size()) * v[0] * v[0];
      return true;
    }
    case LinearOp::Kind::Scaled:
      return add_spectral(*op.base(), shape, weight * op.factor() * op.factor(), acc);
    default:
      return false;
  }
}

void add_dense_gram(const LinearOp& op, double weight, Eigen::MatrixXd& g) {
  switch (op.kind()) {
    case LinearOp::Kind::Identity:
      g.diagonal().array() += weight;
      return;
    case LinearOp::Kind::Select:
      for (auto i : *op.indices()) g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) += weight;
      return;
    case LinearOp::Kind::InnerProduct: {
      const Vec& v = *op.vector();
      g.noalias() += weight * v * v.transpose();
      return;
    }
    case LinearOp::Kind::Scaled:
      add_dense_gram(*op.base(), weight * op.factor() * op.factor(), g);
      return;
    default: {
      const RowMajorMat m = op.to_dense();
      g.noalias() += weight * m.transpose() * m;
    }
  }
}

}  // namespace

GramSolver GramSolver::build(double shift, std::span<const LinearOp> ops) {
  require(shift == 1.0 || shift == 2.0, "GramSolver: shift must be 1 or 2");
  require(!ops.empty(), "GramSolver: need at least one operator");
  const std::size_t n = ops[0].in_dim();
  for (const auto& op : ops) {
    if (op.in_dim() != n) {
      throw DimensionError("GramSolver: operators have mixed input dimensions (" +
                           std::to_string(n) + " vs " + std::to_string(op.in_dim()) + ")");
    }
  }

  GramSolver g;
  g.shift_ = shift;
  g.dim_ = n;

  double id_sum = 0.0;
  bool all_identity = true;
  for (const auto& op : ops) {
    auto w = identity_weight(op);
    if (!w) {
      all_identity = false;
      break;
    }
    id_sum += *w;
  }
  if (all_identity) {
    g.strategy_ = Strategy::ScaledIdentity;
    g.scale_ = 1.0 / (shift + id_sum);
    return g;
  }

  std::optional<GridShape> shape;
  bool shapes_agree = true;
  for (const auto& op : ops) {
    if (const GridShape* s = find_grid(op)) {
      if (shape && !(*shape == *s)) shapes_agree = false;
      shape = *s;
    }
  }
  if (shapes_agree) {
    const GridShape grid = shape.value_or(GridShape{1, n});
    auto dft = real_dft(grid);
    std::vector<double> acc(dft->spectrum_size(), shift);
    bool ok = true;
    for (const auto& op : ops) {
      if (!add_spectral(op, grid, 1.0, acc)) {
        ok = false;
        break;
      }
    }
    if (ok) {
      for (auto& a : acc) a = 1.0 / a;
      g.strategy_ = Strategy::Spectral;
      g.dft_ = std::move(dft);
      g.inverse_multipliers_ = std::make_shared<const std::vector<double>>(std::move(acc));
      return g;
    }
  }

  Eigen::MatrixXd m = shift * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (const auto& op : ops) add_dense_gram(op, 1.0, m);
  if (!m.allFinite()) throw NumericalError("GramSolver: assembled Gram matrix has non-finite entries");
  auto f = std::make_shared<Factor>();
  f->llt.compute(m);
  if (f->llt.info() != Eigen::Success || !f->llt.matrixLLT().allFinite() ||
      (f->llt.matrixLLT().diagonal().array() <= 0.0).any()) {
    throw NumericalError("GramSolver: Gram matrix is not numerically positive definite");
  }
  g.strategy_ = Strategy::Cholesky;
  g.factor_ = std::move(f);
  return g;
}

Vec GramSolver::solve(const Vec& x) const {
  require_dim(static_cast<std::size_t>(x.size()), dim_, "GramSolver::solve");
  switch (strategy_) {
    case Strategy::ScaledIdentity:
      return scale_ * x;
    case Strategy::Spectral: {
      auto X = dft_->forward(x);
      const auto& inv = *inverse_multipliers_;
      for (std::size_t i = 0; i < X.size(); ++i) X[i] *= inv[i];
      return dft_->inverse(X);
    }
    case Strategy::Cholesky:
      return factor_->llt.solve(x);
  }
  return x;
}

double GramSolver::cost() const {
  const double n = static_cast<double>(dim_);
  switch (strategy_) {
    case Strategy::ScaledIdentity:
      return n;
    case Strategy::Spectral:
      return 5.0 * n * std::log2(std::max(2.0, n)) + 2.0 * n;
    case Strategy::Cholesky:
      return 2.0 * n * n;
  }
  return n;
}

Vec GramSolver::apply_gram(double shift, std::span<const LinearOp> ops, const Vec& x) {
  Vec y = shift * x;
  for (const auto& op : ops) y += op.adjoint_apply(op.apply(x));
  return y;
}

std::string to_string(GramSolver::Strategy s) {
  switch (s) {
    case GramSolver::Strategy::ScaledIdentity: return "ScaledIdentity";
    case GramSolver::Strategy::Spectral: return "Spectral";
    case GramSolver::Strategy::Cholesky: return "Cholesky";
  }
  return "?";
}

GraphProjection project_graph(const GramSolver& gram1, const Vec& x, std::span<const Vec> ys,
                              std::span<const LinearOp> ops) {
  require(gram1.shift() == 1.0, "project_graph: Gram solver must have shift 1");
  require_dim(ys.size(), ops.size(), "project_graph: number of blocks");
  Vec rhs = x;
  for (std::size_t k = 0; k < ops.size(); ++k) rhs += ops[k].adjoint_apply(ys[k]);
  GraphProjection out;
  out.s = gram1.solve(rhs);
  out.images.reserve(ops.size());
  for (const auto& op : ops) out.images.push_back(op.apply(out.s));
  return out;
}

CoupledProjection project_coupled(const GramSolver& gram2, const Vec& x1,
                                  std::span<const Vec> xs, std::span<const Vec> ys,
                                  std::span<const LinearOp> ops) {
  require(gram2.shift() == 2.0, "project_coupled: Gram solver must have shift 2");
  require_dim(xs.size(), ops.size(), "project_coupled: number of agents");
  require_dim(ys.size(), ops.size(), "project_coupled: number of duals");
  Vec rhs = 2.0 * x1;
  for (std::size_t k = 0; k < ops.size(); ++k) rhs += ops[k].adjoint_apply(xs[k] + ys[k]);
  CoupledProjection out;
  out.q = gram2.solve(rhs);
  for (std::size_t k = 0; k < ops.size(); ++k) {
    const Vec lq = ops[k].apply(out.q);
    out.agents.push_back(0.5 * (lq + xs[k] - ys[k]));
    out.duals.push_back(0.5 * (lq - xs[k] + ys[k]));
  }
  return out;
}

}  // namespace rasplit
