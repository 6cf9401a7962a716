#include "bift/tensor.hpp"

#include <cmath>
#include <sstream>

namespace bift {

std::string Shape::str() const {
  std::ostringstream os;
  os << "(" << n << "," << c << "," << h << "," << w << ")";
  return os.str();
}

template <typename T>
bool Tensor<T>::all_finite() const {
  for (const T& v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

template <typename T>
template <typename U>
Tensor<U> Tensor<T>::cast() const {
  Tensor<U> out(shape_);
  for (int64_t i = 0; i < count(); ++i) out[i] = static_cast<U>(data_[i]);
  out.requires_grad = requires_grad;
  return out;
}

template class Tensor<float>;
template class Tensor<double>;
template Tensor<double> Tensor<float>::cast<double>() const;
template Tensor<float> Tensor<double>::cast<float>() const;
template Tensor<float> Tensor<float>::cast<float>() const;
template Tensor<double> Tensor<double>::cast<double>() const;

}  // namespace bift
