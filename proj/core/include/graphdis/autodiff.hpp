#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <vector>

#include "graphdis/param_store.hpp"
#include "graphdis/tensor.hpp"

// Reverse-mode differentiation over dense tensors. A Tape records every
// operation applied to its Vars; backward() walks the record in reverse and
// accumulates gradients into requiring leaves and bound Parameters.
namespace graphdis::ad {

class Tape;

class Var {
 public:
  Var() = default;
  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }
  Tape* tape() const { return tape_; }
  std::size_t id() const { return id_; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}
  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

class Tape {
 public:
  using Backward = std::function<void(Tape&, const Tensor& grad_out)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Tensor t);
  // Borrows `t`; it must outlive the tape.
  Var constant_ref(const Tensor& t);
  // Leaf whose gradient is readable through grad() after backward().
  Var variable(Tensor t);
  // Leaf bound to p; backward() adds into p.grad.
  Var parameter(Parameter& p);

  // Seeds d(loss)/d(loss) = 1. `loss` must hold a single element.
  void backward(Var loss);

  const Tensor& value(Var v) const;
  // Empty tensor if no gradient reached v.
  const Tensor& grad(Var v) const;
  bool requires_grad(Var v) const { return nodes_[v.id()].requires_grad; }
  std::size_t size() const { return nodes_.size(); }

  // Op plumbing. Throws NumericError when `value` holds NaN or infinity.
  Var record(Tensor value, bool requires_grad, Backward backward, const char* op);
  const Tensor& value(std::size_t id) const;
  // Gradient buffer of node `id`, allocated as zeros on first use; nullptr if
  // the node does not require a gradient.
  Tensor* grad_buffer(std::size_t id);

 private:
  struct Node {
    Tensor value;
    const Tensor* ref = nullptr;
    Tensor grad;
    Backward backward;
    Parameter* param = nullptr;
    bool requires_grad = false;
  };
  std::deque<Node> nodes_;
};

// Matrix products: [M,K]x[K,N] and batched [B,M,K]x[B,K,N].
Var matmul(Var a, Var b);
Var bmm(Var a, Var b);

// Elementwise with broadcasting: equal ranks, each axis equal or 1.
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);

Var scale(Var a, double factor);
Var add_scalar(Var a, double offset);
Var square(Var a);
Var sigmoid(Var a);
Var tanh(Var a);
Var exp(Var a);
Var log(Var a);
// Gradient passes only where lo <= x <= hi.
Var clamp(Var a, double lo, double hi);

Var sum(Var a);
Var mean(Var a);

// Along the last axis; leading axes must agree.
Var concat(const std::vector<Var>& parts);
Var slice_last(Var a, std::size_t begin, std::size_t end);
Var reshape(Var a, Shape shape);

}  // namespace graphdis::ad
