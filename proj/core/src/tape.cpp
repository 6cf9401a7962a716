#include "bift/tape.hpp"

namespace bift {

template <typename T>
int Tape<T>::leaf(Tensor<T> v, const char* op) {
  Node n;
  n.op = op;
  n.value = std::move(v);
  n.req_grad = n.value.requires_grad;
  nodes_.push_back(std::move(n));
  grads_.emplace_back();
  return static_cast<int>(nodes_.size()) - 1;
}

template <typename T>
int Tape<T>::param(Parameter<T>& p) {
  auto it = param_nodes_.find(&p);
  if (it != param_nodes_.end()) return it->second;
  Node n;
  n.op = "param";
  n.value = p.value;
  n.req_grad = p.value.requires_grad;
  n.param = &p;
  nodes_.push_back(std::move(n));
  grads_.emplace_back();
  int id = static_cast<int>(nodes_.size()) - 1;
  param_nodes_.emplace(&p, id);
  return id;
}

template <typename T>
int Tape<T>::frozen(const Parameter<T>& p) {
  Node n;
  n.op = "frozen";
  n.value = p.value;
  n.req_grad = false;
  nodes_.push_back(std::move(n));
  grads_.emplace_back();
  return static_cast<int>(nodes_.size()) - 1;
}

template <typename T>
int Tape<T>::emit(const char* op, std::vector<int> inputs, Tensor<T> value, BackFn back) {
  bool req = false;
  for (int i : inputs) req = req || nodes_[static_cast<size_t>(i)].req_grad;
  if (finite_checks && !value.all_finite())
    fail(Err::Numeric, std::string("non-finite output of op '") + op + "'");
  Node n;
  n.op = op;
  n.inputs = std::move(inputs);
  n.value = std::move(value);
  n.req_grad = req;
  if (req) n.back = std::move(back);
  nodes_.push_back(std::move(n));
  grads_.emplace_back();
  return static_cast<int>(nodes_.size()) - 1;
}

template <typename T>
void Tape<T>::accum_grad(int id, const Tensor<T>& g) {
  Node& n = nodes_[static_cast<size_t>(id)];
  if (!n.req_grad) return;
  Tensor<T>& buf = grads_[static_cast<size_t>(id)];
  if (buf.empty()) buf = Tensor<T>(n.value.shape());
  check(buf.shape() == g.shape(), Err::DimMismatch,
        std::string("gradient shape mismatch at op '") + n.op + "'");
  T* dst = buf.data();
  const T* src = g.data();
  for (int64_t i = 0, c = g.count(); i < c; ++i) dst[i] += src[i];
}

template <typename T>
Tensor<T>& Tape<T>::grad(int id) {
  Node& n = nodes_[static_cast<size_t>(id)];
  Tensor<T>& buf = grads_[static_cast<size_t>(id)];
  if (buf.empty() && n.value.count() > 0) buf = Tensor<T>(n.value.shape());
  return buf;
}

template <typename T>
void Tape<T>::backward(int loss) {
  check(!backward_done_, Err::InvalidArgument,
        "backward called twice on one tape; rebuild the graph or reset gradients");
  backward_done_ = true;
  const Node& ln = nodes_[static_cast<size_t>(loss)];
  check(ln.value.shape() == Shape{1, 1, 1, 1}, Err::InvalidArgument,
        "backward requires a scalar (1,1,1,1) loss, got " + ln.value.shape().str());

  if (ln.req_grad) grad(loss)[0] = T(1);

  for (int id = loss; id >= 0; --id) {
    Node& n = nodes_[static_cast<size_t>(id)];
    if (!n.req_grad || grads_[static_cast<size_t>(id)].empty()) continue;
    if (n.back) n.back(*this, id);
  }

  for (auto& [p, id] : param_nodes_) {
    Parameter<T>* param = nodes_[static_cast<size_t>(id)].param;
    if (!param->value.requires_grad) continue;
    check(!param->grad_set, Err::InvalidArgument,
          "gradient of '" + param->name + "' accumulated without reset");
    Tensor<T>& g = grads_[static_cast<size_t>(id)];
    if (g.empty()) {
      param->grad = Tensor<T>(param->value.shape());  // disconnected: zero gradient
    } else {
      param->grad = std::move(g);
    }
    param->grad_set = true;
  }
}

template class Tape<float>;
template class Tape<double>;
template struct Parameter<float>;
template struct Parameter<double>;

}  // namespace bift
