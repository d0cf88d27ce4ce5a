#include "rasplit/linops.hpp"

#include <cmath>
#include <sstream>
#include <variant>

namespace rasplit {

namespace {

struct DenseData {
  RowMajorMat m;
};
struct CirculantData {
  GridShape shape;
  Vec kernel;
  std::shared_ptr<const RealDft> dft;
  std::vector<Complex> spectrum;
};
struct RowBlockData {
  std::shared_ptr<const RowMajorMat> parent;
  std::size_t first;
  std::size_t count;
};
struct SelectData {
  std::vector<std::size_t> idx;
  std::size_t n;
};
struct InnerData {
  Vec v;
};
struct IdentityData {
  std::size_t n;
};
struct ScaledData {
  LinearOp base;
  double factor;
};

double fft_cost(std::size_t n) {
  const double dn = static_cast<double>(n);
  return 2.5 * dn * std::log2(std::max(2.0, dn));
}

}  // namespace

struct LinearOp::Impl {
  std::variant<DenseData, CirculantData, RowBlockData, SelectData, InnerData, IdentityData,
               ScaledData>
      data;
  std::size_t in = 0;
  std::size_t out = 0;
};

LinearOp::LinearOp(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

LinearOp LinearOp::dense(RowMajorMat m) {
  require(m.rows() > 0 && m.cols() > 0, "dense operator must be non-empty");
  auto impl = std::make_shared<Impl>();
  impl->in = static_cast<std::size_t>(m.cols());
  impl->out = static_cast<std::size_t>(m.rows());
  impl->data = DenseData{std::move(m)};
  return LinearOp(impl);
}

LinearOp LinearOp::circulant(Vec kernel, GridShape shape) {
  require(shape.size() > 0, "circulant grid must be non-empty");
  require_dim(static_cast<std::size_t>(kernel.size()), shape.size(), "circulant kernel");
  auto impl = std::make_shared<Impl>();
  impl->in = impl->out = shape.size();
  CirculantData d{shape, std::move(kernel), real_dft(shape), {}};
  d.spectrum = d.dft->forward(d.kernel);
  impl->data = std::move(d);
  return LinearOp(impl);
}

LinearOp LinearOp::circulant(Vec kernel) {
  const auto n = static_cast<std::size_t>(kernel.size());
  return circulant(std::move(kernel), GridShape{1, n});
}

LinearOp LinearOp::row_block(std::shared_ptr<const RowMajorMat> parent, std::size_t first,
                             std::size_t count) {
  require(parent != nullptr, "row_block: null parent");
  require(count > 0 && first + count <= static_cast<std::size_t>(parent->rows()),
          "row_block: row range out of bounds");
  auto impl = std::make_shared<Impl>();
  impl->in = static_cast<std::size_t>(parent->cols());
  impl->out = count;
  impl->data = RowBlockData{std::move(parent), first, count};
  return LinearOp(impl);
}

LinearOp LinearOp::select(std::vector<std::size_t> indices, std::size_t n) {
  require(!indices.empty(), "select: empty index set");
  for (auto i : indices) require(i < n, "select: index out of range");
  auto impl = std::make_shared<Impl>();
  impl->in = n;
  impl->out = indices.size();
  impl->data = SelectData{std::move(indices), n};
  return LinearOp(impl);
}

LinearOp LinearOp::inner_product(Vec v) {
  require(v.size() > 0, "inner_product: empty vector");
  auto impl = std::make_shared<Impl>();
  impl->in = static_cast<std::size_t>(v.size());
  impl->out = 1;
  impl->data = InnerData{std::move(v)};
  return LinearOp(impl);
}

LinearOp LinearOp::identity(std::size_t n) {
  require(n > 0, "identity: dimension must be positive");
  auto impl = std::make_shared<Impl>();
  impl->in = impl->out = n;
  impl->data = IdentityData{n};
  return LinearOp(impl);
}

LinearOp LinearOp::scaled(const LinearOp& base, double factor) {
  require(std::isfinite(factor), "scaled: factor must be finite");
  auto impl = std::make_shared<Impl>();
  impl->in = base.in_dim();
  impl->out = base.out_dim();
  impl->data = ScaledData{base, factor};
  return LinearOp(impl);
}

LinearOp::Kind LinearOp::kind() const { return static_cast<Kind>(impl_->data.index()); }
std::size_t LinearOp::in_dim() const { return impl_->in; }
std::size_t LinearOp::out_dim() const { return impl_->out; }

std::string LinearOp::describe() const {
  std::ostringstream os;
  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, DenseData>) os << "Dense";
        else if constexpr (std::is_same_v<T, CirculantData>) os << "Circulant";
        else if constexpr (std::is_same_v<T, RowBlockData>) os << "RowBlock[" << d.first << "+" << d.count << "]";
        else if constexpr (std::is_same_v<T, SelectData>) os << "Select";
        else if constexpr (std::is_same_v<T, InnerData>) os << "InnerProduct";
        else if constexpr (std::is_same_v<T, IdentityData>) os << "Identity";
        else os << "Scaled(" << d.factor << "*" << d.base.describe() << ")";
      },
      impl_->data);
  os << "(" << impl_->out << "x" << impl_->in << ")";
  return os.str();
}

Vec LinearOp::apply(const Vec& x) const {
  if (static_cast<std::size_t>(x.size()) != impl_->in) {
    throw DimensionError(describe() + ".apply: input length " + std::to_string(x.size()) +
                         ", expected " + std::to_string(impl_->in));
  }
  return std::visit(
      [&](const auto& d) -> Vec {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, DenseData>) {
          return d.m * x;
        } else if constexpr (std::is_same_v<T, CirculantData>) {
          auto X = d.dft->forward(x);
          for (std::size_t i = 0; i < X.size(); ++i) X[i] *= d.spectrum[i];
          return d.dft->inverse(X);
        } else if constexpr (std::is_same_v<T, RowBlockData>) {
          return d.parent->middleRows(static_cast<Eigen::Index>(d.first),
                                      static_cast<Eigen::Index>(d.count)) * x;
        } else if constexpr (std::is_same_v<T, SelectData>) {
          Vec y(static_cast<Eigen::Index>(d.idx.size()));
          for (std::size_t i = 0; i < d.idx.size(); ++i) y[i] = x[d.idx[i]];
          return y;
        } else if constexpr (std::is_same_v<T, InnerData>) {
          Vec y(1);
          y[0] = d.v.dot(x);
          return y;
        } else if constexpr (std::is_same_v<T, IdentityData>) {
          return x;
        } else {
          return d.factor * d.base.apply(x);
        }
      },
      impl_->data);
}

Vec LinearOp::adjoint_apply(const Vec& y) const {
  if (static_cast<std::size_t>(y.size()) != impl_->out) {
    throw DimensionError(describe() + ".adjoint_apply: input length " + std::to_string(y.size()) +
                         ", expected " + std::to_string(impl_->out));
  }
  return std::visit(
      [&](const auto& d) -> Vec {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, DenseData>) {
          return d.m.transpose() * y;
        } else if constexpr (std::is_same_v<T, CirculantData>) {
          auto Y = d.dft->forward(y);
          for (std::size_t i = 0; i < Y.size(); ++i) Y[i] *= std::conj(d.spectrum[i]);
          return d.dft->inverse(Y);
        } else if constexpr (std::is_same_v<T, RowBlockData>) {
          return d.parent->middleRows(static_cast<Eigen::Index>(d.first),
                                      static_cast<Eigen::Index>(d.count)).transpose() * y;
        } else if constexpr (std::is_same_v<T, SelectData>) {
          Vec x = Vec::Zero(static_cast<Eigen::Index>(d.n));
          for (std::size_t i = 0; i < d.idx.size(); ++i) x[d.idx[i]] += y[i];
          return x;
        } else if constexpr (std::is_same_v<T, InnerData>) {
          return y[0] * d.v;
        } else if constexpr (std::is_same_v<T, IdentityData>) {
          return y;
        } else {
          return d.factor * d.base.adjoint_apply(y);
        }
      },
      impl_->data);
}

RowMajorMat LinearOp::to_dense() const {
  const auto out = static_cast<Eigen::Index>(impl_->out), in = static_cast<Eigen::Index>(impl_->in);
  return std::visit(
      [&](const auto& d) -> RowMajorMat {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, DenseData>) {
          return d.m;
        } else if constexpr (std::is_same_v<T, RowBlockData>) {
          return d.parent->middleRows(static_cast<Eigen::Index>(d.first),
                                      static_cast<Eigen::Index>(d.count));
        } else if constexpr (std::is_same_v<T, SelectData>) {
          RowMajorMat m = RowMajorMat::Zero(out, in);
          for (std::size_t i = 0; i < d.idx.size(); ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d.idx[i])) = 1.0;
          return m;
        } else if constexpr (std::is_same_v<T, InnerData>) {
          return d.v.transpose();
        } else if constexpr (std::is_same_v<T, IdentityData>) {
          return RowMajorMat::Identity(out, in);
        } else if constexpr (std::is_same_v<T, ScaledData>) {
          return d.factor * d.base.to_dense();
        } else {
          // Circulant: C[i, j] = k[(i - j) mod grid], per axis.
          RowMajorMat m(out, in);
          const auto R = d.shape.rows, C = d.shape.cols;
          for (std::size_t r = 0; r < R; ++r)
            for (std::size_t c = 0; c < C; ++c)
              for (std::size_t r2 = 0; r2 < R; ++r2)
                for (std::size_t c2 = 0; c2 < C; ++c2) {
                  const std::size_t dr = (r + R - r2) % R, dc = (c + C - c2) % C;
                  m(static_cast<Eigen::Index>(r * C + c), static_cast<Eigen::Index>(r2 * C + c2)) =
                      d.kernel[static_cast<Eigen::Index>(dr * C + dc)];
                }
          return m;
        }
      },
      impl_->data);
}

double LinearOp::cost() const {
  return std::visit(
      [&](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, DenseData>) return 2.0 * static_cast<double>(d.m.size());
        else if constexpr (std::is_same_v<T, CirculantData>)
          return 2.0 * fft_cost(d.shape.size()) + 4.0 * static_cast<double>(d.spectrum.size());
        else if constexpr (std::is_same_v<T, RowBlockData>)
          return 2.0 * static_cast<double>(d.count * static_cast<std::size_t>(d.parent->cols()));
        else if constexpr (std::is_same_v<T, SelectData>) return static_cast<double>(d.idx.size());
        else if constexpr (std::is_same_v<T, InnerData>) return 2.0 * static_cast<double>(d.v.size());
        else if constexpr (std::is_same_v<T, IdentityData>) return static_cast<double>(d.n);
        else return d.base.cost() + static_cast<double>(impl_->out);
      },
      impl_->data);
}

const RowMajorMat* LinearOp::matrix() const {
  auto* d = std::get_if<DenseData>(&impl_->data);
  return d ? &d->m : nullptr;
}
const GridShape* LinearOp::grid() const {
  auto* d = std::get_if<CirculantData>(&impl_->data);
  return d ? &d->shape : nullptr;
}
const Vec* LinearOp::kernel() const {
  auto* d = std::get_if<CirculantData>(&impl_->data);
  return d ? &d->kernel : nullptr;
}
const std::vector<Complex>* LinearOp::multipliers() const {
  auto* d = std::get_if<CirculantData>(&impl_->data);
  return d ? &d->spectrum : nullptr;
}
const std::vector<std::size_t>* LinearOp::indices() const {
  auto* d = std::get_if<SelectData>(&impl_->data);
  return d ? &d->idx : nullptr;
}
const Vec* LinearOp::vector() const {
  auto* d = std::get_if<InnerData>(&impl_->data);
  return d ? &d->v : nullptr;
}
const LinearOp* LinearOp::base() const {
  auto* d = std::get_if<ScaledData>(&impl_->data);
  return d ? &d->base : nullptr;
}
double LinearOp::factor() const {
  auto* d = std::get_if<ScaledData>(&impl_->data);
  return d ? d->factor : 1.0;
}

namespace kernels {

namespace {
// Signed offset of grid index i on an axis of length n (centered wrap-around).
long offset(std::size_t i, std::size_t n) {
  const long li = static_cast<long>(i), ln = static_cast<long>(n);
  return li <= ln / 2 ? li : li - ln;
}

Vec normalized(Vec k) {
  const double s = k.sum();
  require(s > 0.0, "kernel has zero mass");
  return k / s;
}

// Taps at offsets -(len/2) .. len-1-len/2 along one axis, wrapped.
Vec uniform_axis(GridShape shape, std::size_t length, bool vertical) {
  const std::size_t n = vertical ? shape.rows : shape.cols;
  require(length >= 1 && length <= n, "uniform kernel longer than grid axis");
  Vec k = Vec::Zero(static_cast<Eigen::Index>(shape.size()));
  const long lo = -static_cast<long>(length / 2);
  for (std::size_t t = 0; t < length; ++t) {
    const long off = lo + static_cast<long>(t);
    const std::size_t idx = static_cast<std::size_t>((off % static_cast<long>(n) + static_cast<long>(n)) % static_cast<long>(n));
    k[static_cast<Eigen::Index>(vertical ? idx * shape.cols : idx)] += 1.0;
  }
  return normalized(k);
}
}  // namespace

Vec gaussian(GridShape shape, double stddev) {
  require(stddev > 0.0, "gaussian kernel: stddev must be positive");
  Vec k(static_cast<Eigen::Index>(shape.size()));
  for (std::size_t r = 0; r < shape.rows; ++r) {
    const double dr = static_cast<double>(offset(r, shape.rows));
    for (std::size_t c = 0; c < shape.cols; ++c) {
      const double dc = static_cast<double>(offset(c, shape.cols));
      k[static_cast<Eigen::Index>(r * shape.cols + c)] =
          std::exp(-(dr * dr + dc * dc) / (2.0 * stddev * stddev));
    }
  }
  return normalized(k);
}

Vec uniform_vertical(GridShape shape, std::size_t length) { return uniform_axis(shape, length, true); }
Vec uniform_horizontal(GridShape shape, std::size_t length) { return uniform_axis(shape, length, false); }

Vec delta(GridShape shape) {
  Vec k = Vec::Zero(static_cast<Eigen::Index>(shape.size()));
  k[0] = 1.0;
  return k;
}

}  // namespace kernels

}  // namespace rasplit
