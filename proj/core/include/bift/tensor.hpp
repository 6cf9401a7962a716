#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bift/error.hpp"

namespace bift {

enum class Dtype : uint8_t { f32 = 0, f64 = 1 };

template <typename T>
constexpr Dtype dtype_of();
template <>
constexpr Dtype dtype_of<float>() { return Dtype::f32; }
template <>
constexpr Dtype dtype_of<double>() { return Dtype::f64; }

// Extents of a rank-4 NCHW tensor.
struct Shape {
  int64_t n = 0, c = 0, h = 0, w = 0;

  int64_t count() const { return n * c * h * w; }
  int64_t spatial() const { return h * w; }
  bool operator==(const Shape&) const = default;
  std::string str() const;
};

// Dense rank-4 tensor, contiguous row-major NCHW.
template <typename T>
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape s, T fill = T(0)) : shape_(s), data_(static_cast<size_t>(s.count()), fill) {
    check(s.n >= 0 && s.c >= 0 && s.h >= 0 && s.w >= 0, Err::InvalidArgument,
          "negative tensor extent " + s.str());
  }
  Tensor(Shape s, std::vector<T> data) : shape_(s), data_(std::move(data)) {
    check(static_cast<int64_t>(data_.size()) == s.count(), Err::DimMismatch,
          "data length does not match " + s.str());
  }

  static Tensor zeros(Shape s) { return Tensor(s); }
  static Tensor full(Shape s, T v) { return Tensor(s, v); }

  const Shape& shape() const { return shape_; }
  int64_t count() const { return shape_.count(); }
  bool empty() const { return data_.empty(); }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  std::vector<T>& vec() { return data_; }
  const std::vector<T>& vec() const { return data_; }

  T& at(int64_t n, int64_t c, int64_t h, int64_t w) {
    return data_[((n * shape_.c + c) * shape_.h + h) * shape_.w + w];
  }
  T at(int64_t n, int64_t c, int64_t h, int64_t w) const {
    return data_[((n * shape_.c + c) * shape_.h + h) * shape_.w + w];
  }
  T& operator[](int64_t i) { return data_[i]; }
  T operator[](int64_t i) const { return data_[i]; }

  // Whether backward should track gradients for this tensor when it enters a
  // tape as a leaf. Parameters set this; plain data leaves leave it false.
  bool requires_grad = false;

  bool all_finite() const;
  template <typename U>
  Tensor<U> cast() const;

 private:
  Shape shape_;
  std::vector<T> data_;
};

using TensorF = Tensor<float>;
using TensorD = Tensor<double>;

extern template class Tensor<float>;
extern template class Tensor<double>;

}  // namespace bift
