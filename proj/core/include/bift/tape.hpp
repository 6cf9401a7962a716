#pragma once

#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "bift/tensor.hpp"

namespace bift {

// A named, trainable tensor. Gradients are written once per backward pass
// and must be zeroed (by the optimizer or zero_grad) before the next one;
// accumulating into a stale gradient is an error.
template <typename T>
struct Parameter {
  std::string name;
  Tensor<T> value;
  Tensor<T> grad;
  bool grad_set = false;

  Parameter() = default;
  Parameter(std::string n, Tensor<T> v) : name(std::move(n)), value(std::move(v)), grad(value.shape()) {
    value.requires_grad = true;
  }

  void zero_grad() {
    std::fill(grad.vec().begin(), grad.vec().end(), T(0));
    grad_set = false;
  }
};

// Reverse-mode tape. Forward ops append nodes in topological order; each
// node records its op id, input node refs, the forward value, and a closure
// holding whatever its backward needs (inputs are read back off the tape,
// never recomputed).
template <typename T>
class Tape {
 public:
  using BackFn = std::function<void(Tape&, int self)>;

  // Constant leaf; tracked only if v.requires_grad.
  int leaf(Tensor<T> v, const char* op = "leaf");

  // Parameter leaf. Repeat calls with the same parameter return the same
  // node. After backward the node gradient lands in p.grad.
  int param(Parameter<T>& p);

  // Constant view of a parameter: gradients flow through it to other inputs
  // but are never written back (used to freeze one network while training
  // the other).
  int frozen(const Parameter<T>& p);

  int emit(const char* op, std::vector<int> inputs, Tensor<T> value, BackFn back);

  const Tensor<T>& value(int id) const { return nodes_[static_cast<size_t>(id)].value; }
  const char* op_name(int id) const { return nodes_[static_cast<size_t>(id)].op; }
  bool needs_grad(int id) const { return nodes_[static_cast<size_t>(id)].req_grad; }
  size_t size() const { return nodes_.size(); }

  // Accumulate into a node's gradient buffer; no-op for untracked nodes.
  void accum_grad(int id, const Tensor<T>& g);
  // Gradient buffer of a tracked node (allocated on demand, zero-filled).
  Tensor<T>& grad(int id);
  bool has_grad(int id) const {
    return nodes_[static_cast<size_t>(id)].req_grad && !grads_[static_cast<size_t>(id)].empty();
  }

  // Reverse sweep from a scalar loss node. Populates Parameter::grad for
  // every parameter on the tape (zero tensor if unreached). Errors: loss not
  // (1,1,1,1); called twice; a parameter whose grad was never reset.
  void backward(int loss);

  bool backward_done() const { return backward_done_; }

  // Verify op outputs are finite as they are emitted (on by default).
  bool finite_checks = true;

 private:
  struct Node {
    const char* op;
    std::vector<int> inputs;
    Tensor<T> value;
    BackFn back;
    Parameter<T>* param = nullptr;
    bool req_grad = false;
  };

  std::vector<Node> nodes_;
  std::vector<Tensor<T>> grads_;
  std::unordered_map<const Parameter<T>*, int> param_nodes_;
  bool backward_done_ = false;
};

extern template class Tape<float>;
extern template class Tape<double>;
extern template struct Parameter<float>;
extern template struct Parameter<double>;

}  // namespace bift
