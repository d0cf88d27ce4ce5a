#pragma once

#include "rasplit/types.hpp"

#include <complex>
#include <memory>
#include <vector>

namespace rasplit {

using Complex = std::complex<double>;

/// Real-to-half-complex DFT over a 1-D or 2-D periodic grid.
/// Spectrum layout is rows x (cols/2 + 1), row-major. Forward is unnormalized,
/// inverse includes the 1/N factor.
class RealDft {
 public:
  explicit RealDft(GridShape shape);
  ~RealDft();
  RealDft(const RealDft&) = delete;
  RealDft& operator=(const RealDft&) = delete;

  const GridShape& shape() const { return shape_; }
  std::size_t spectrum_size() const { return shape_.rows * (shape_.cols / 2 + 1); }

  std::vector<Complex> forward(const Vec& x) const;
  Vec inverse(const std::vector<Complex>& spectrum) const;

  /// Multiplicity of each half-spectrum bin in the full spectrum (1 or 2).
  const std::vector<double>& bin_weights() const { return weights_; }

 private:
  GridShape shape_;
  void* fwd_ = nullptr;
  void* inv_ = nullptr;
  std::vector<double> weights_;
};

/// Full complex DFT over a 1-D or 2-D grid.
class ComplexDft {
 public:
  explicit ComplexDft(GridShape shape);
  ~ComplexDft();
  ComplexDft(const ComplexDft&) = delete;
  ComplexDft& operator=(const ComplexDft&) = delete;

  const GridShape& shape() const { return shape_; }

  std::vector<Complex> forward(const std::vector<Complex>& x) const;
  /// Includes the 1/N factor.
  std::vector<Complex> inverse(const std::vector<Complex>& spectrum) const;

 private:
  GridShape shape_;
  void* fwd_ = nullptr;
  void* inv_ = nullptr;
};

/// Shared plan cache; plans are created under a lock and reused.
std::shared_ptr<const RealDft> real_dft(GridShape shape);
std::shared_ptr<const ComplexDft> complex_dft(GridShape shape);

}  // namespace rasplit
