#include "rasplit/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

namespace rasplit {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

constexpr unsigned kFlags = FFTW_ESTIMATE | FFTW_UNALIGNED;

void check_shape(const GridShape& s) {
  if (s.rows == 0 || s.cols == 0) throw InvalidArgument("DFT grid must be non-empty");
}

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

RealDft::RealDft(GridShape shape) : shape_(shape) {
  check_shape(shape_);
  std::vector<double> in(shape_.size());
  std::vector<Complex> out(spectrum_size());
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    const int r = static_cast<int>(shape_.rows), c = static_cast<int>(shape_.cols);
    if (shape_.is_2d()) {
      fwd_ = fftw_plan_dft_r2c_2d(r, c, in.data(), as_fftw(out.data()), kFlags);
      inv_ = fftw_plan_dft_c2r_2d(r, c, as_fftw(out.data()), in.data(), kFlags);
    } else {
      fwd_ = fftw_plan_dft_r2c_1d(c, in.data(), as_fftw(out.data()), kFlags);
      inv_ = fftw_plan_dft_c2r_1d(c, as_fftw(out.data()), in.data(), kFlags);
    }
  }
  if (!fwd_ || !inv_) throw NumericalError("FFTW planning failed");
  const std::size_t half = shape_.cols / 2 + 1;
  weights_.assign(spectrum_size(), 2.0);
  for (std::size_t r = 0; r < shape_.rows; ++r) {
    weights_[r * half] = 1.0;
    if (shape_.cols % 2 == 0) weights_[r * half + half - 1] = 1.0;
  }
}

RealDft::~RealDft() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (fwd_) fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  if (inv_) fftw_destroy_plan(static_cast<fftw_plan>(inv_));
}

std::vector<Complex> RealDft::forward(const Vec& x) const {
  require_dim(static_cast<std::size_t>(x.size()), shape_.size(), "RealDft::forward");
  Vec in = x;  // r2c may not modify input, but FFTW wants a non-const pointer
  std::vector<Complex> out(spectrum_size());
  fftw_execute_dft_r2c(static_cast<fftw_plan>(fwd_), in.data(), as_fftw(out.data()));
  return out;
}

Vec RealDft::inverse(const std::vector<Complex>& spectrum) const {
  require_dim(spectrum.size(), spectrum_size(), "RealDft::inverse");
  std::vector<Complex> in = spectrum;  // c2r destroys its input
  Vec out(static_cast<Eigen::Index>(shape_.size()));
  fftw_execute_dft_c2r(static_cast<fftw_plan>(inv_), as_fftw(in.data()), out.data());
  out /= static_cast<double>(shape_.size());
  return out;
}

ComplexDft::ComplexDft(GridShape shape) : shape_(shape) {
  check_shape(shape_);
  std::vector<Complex> a(shape_.size()), b(shape_.size());
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    const int r = static_cast<int>(shape_.rows), c = static_cast<int>(shape_.cols);
    if (shape_.is_2d()) {
      fwd_ = fftw_plan_dft_2d(r, c, as_fftw(a.data()), as_fftw(b.data()), FFTW_FORWARD, kFlags);
      inv_ = fftw_plan_dft_2d(r, c, as_fftw(a.data()), as_fftw(b.data()), FFTW_BACKWARD, kFlags);
    } else {
      fwd_ = fftw_plan_dft_1d(c, as_fftw(a.data()), as_fftw(b.data()), FFTW_FORWARD, kFlags);
      inv_ = fftw_plan_dft_1d(c, as_fftw(a.data()), as_fftw(b.data()), FFTW_BACKWARD, kFlags);
    }
  }
  if (!fwd_ || !inv_) throw NumericalError("FFTW planning failed");
}

ComplexDft::~ComplexDft() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (fwd_) fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  if (inv_) fftw_destroy_plan(static_cast<fftw_plan>(inv_));
}

std::vector<Complex> ComplexDft::forward(const std::vector<Complex>& x) const {
  require_dim(x.size(), shape_.size(), "ComplexDft::forward");
  std::vector<Complex> in = x, out(x.size());
  fftw_execute_dft(static_cast<fftw_plan>(fwd_), as_fftw(in.data()), as_fftw(out.data()));
  return out;
}

std::vector<Complex> ComplexDft::inverse(const std::vector<Complex>& spectrum) const {
  require_dim(spectrum.size(), shape_.size(), "ComplexDft::inverse");
  std::vector<Complex> in = spectrum, out(spectrum.size());
  fftw_execute_dft(static_cast<fftw_plan>(inv_), as_fftw(in.data()), as_fftw(out.data()));
  const double scale = 1.0 / static_cast<double>(shape_.size());
  for (auto& v : out) v *= scale;
  return out;
}

namespace {

template <class T>
std::shared_ptr<const T> cached(GridShape shape) {
  // Touch the planner mutex first so it outlives the cache at exit.
  static std::mutex& planner = planner_mutex();
  (void)planner;
  static std::mutex m;
  static std::map<std::pair<std::size_t, std::size_t>, std::shared_ptr<const T>> cache;
  std::lock_guard<std::mutex> lock(m);
  auto& slot = cache[{shape.rows, shape.cols}];
  if (!slot) slot = std::make_shared<const T>(shape);
  return slot;
}

}  // namespace

std::shared_ptr<const RealDft> real_dft(GridShape shape) { return cached<RealDft>(shape); }
std::shared_ptr<const ComplexDft> complex_dft(GridShape shape) { return cached<ComplexDft>(shape); }

}  // namespace rasplit
