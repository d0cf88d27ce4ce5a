#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rasplit {

using Vec = Eigen::VectorXd;
using RowMajorMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Raised when an iterate becomes NaN or Inf.
class DivergenceError : public Error {
 public:
  DivergenceError(std::uint64_t iteration, std::string op, const std::string& what)
      : Error(what), iteration_(iteration), op_(std::move(op)) {}
  std::uint64_t iteration() const { return iteration_; }
  const std::string& op() const { return op_; }

 private:
  std::uint64_t iteration_;
  std::string op_;
};

/// Shape of a 1-D (rows == 1) or 2-D row-major grid.
struct GridShape {
  std::size_t rows = 1;
  std::size_t cols = 0;

  std::size_t size() const { return rows * cols; }
  bool is_2d() const { return rows > 1; }
  bool operator==(const GridShape&) const = default;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw InvalidArgument(msg);
}

inline void require_dim(std::size_t got, std::size_t want, const std::string& who) {
  if (got != want) {
    throw DimensionError(who + ": expected length " + std::to_string(want) + ", got " +
                         std::to_string(got));
  }
}

}  // namespace rasplit
