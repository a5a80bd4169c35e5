#ifndef SSMT_TYPES_HPP
#define SSMT_TYPES_HPP

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ssmt {

using Complex = std::complex<double>;

/// Precondition or configuration violation (bad shapes, out-of-range knobs).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The data itself cannot be processed (too short, non-finite, degenerate).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense row-major matrix.
template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const T> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::vector<T>& data() noexcept { return data_; }
  const std::vector<T>& data() const noexcept { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

/// Window x frequency x taper tensor, taper index fastest.
template <class T>
class Tensor3 {
 public:
  Tensor3() = default;
  Tensor3(std::size_t windows, std::size_t freqs, std::size_t tapers,
          T fill = T{})
      : k_(windows), j_(freqs), m_(tapers), data_(windows * freqs * tapers, fill) {}

  std::size_t windows() const noexcept { return k_; }
  std::size_t freqs() const noexcept { return j_; }
  std::size_t tapers() const noexcept { return m_; }
  std::size_t size() const noexcept { return data_.size(); }

  std::size_t index(std::size_t k, std::size_t j, std::size_t m) const noexcept {
    return (k * j_ + j) * m_ + m;
  }

  T& operator()(std::size_t k, std::size_t j, std::size_t m) {
    return data_[index(k, j, m)];
  }
  const T& operator()(std::size_t k, std::size_t j, std::size_t m) const {
    return data_[index(k, j, m)];
  }

  /// All (j, m) entries of window k, laid out j-major.
  std::span<T> window(std::size_t k) { return {data_.data() + k * j_ * m_, j_ * m_}; }
  std::span<const T> window(std::size_t k) const {
    return {data_.data() + k * j_ * m_, j_ * m_};
  }

  bool same_shape(std::size_t windows, std::size_t freqs, std::size_t tapers) const {
    return k_ == windows && j_ == freqs && m_ == tapers;
  }
  template <class U>
  bool same_shape(const Tensor3<U>& other) const {
    return same_shape(other.windows(), other.freqs(), other.tapers());
  }

  std::vector<T>& data() noexcept { return data_; }
  const std::vector<T>& data() const noexcept { return data_; }

  bool operator==(const Tensor3&) const = default;

 private:
  std::size_t k_ = 0;
  std::size_t j_ = 0;
  std::size_t m_ = 0;
  std::vector<T> data_;
};

}  // namespace ssmt

#endif  // SSMT_TYPES_HPP
