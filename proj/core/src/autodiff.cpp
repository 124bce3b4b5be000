#include "graphdis/autodiff.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

#include "graphdis/error.hpp"

namespace graphdis::ad {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<RowMat>;
using ConstMatMap = Eigen::Map<const RowMat>;

ConstMatMap as_matrix(const double* data, std::size_t rows, std::size_t cols) {
  return ConstMatMap(data, static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

MatMap as_matrix(double* data, std::size_t rows, std::size_t cols) {
  return MatMap(data, static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

Tape& same_tape(Var a, Var b) {
  if (a.tape() == nullptr || a.tape() != b.tape()) {
    throw ValidationError("operands belong to different tapes");
  }
  return *a.tape();
}

[[noreturn]] void shape_mismatch(const char* op, const Shape& a, const Shape& b) {
  throw ShapeError(std::string(op) + ": incompatible shapes " + shape_string(a) + " and " +
                   shape_string(b));
}

// Index maps from each output element to the contributing input elements.
struct Broadcast {
  Shape out;
  std::vector<std::size_t> a_index;
  std::vector<std::size_t> b_index;
  bool trivial = false;
};

Broadcast plan_broadcast(const char* op, const Shape& a, const Shape& b) {
  Broadcast plan;
  if (a == b) {
    plan.out = a;
    plan.trivial = true;
    return plan;
  }
  if (a.size() != b.size()) shape_mismatch(op, a, b);
  const std::size_t rank = a.size();
  plan.out.resize(rank);
  for (std::size_t i = 0; i < rank; ++i) {
    if (a[i] == b[i] || b[i] == 1) {
      plan.out[i] = a[i];
    } else if (a[i] == 1) {
      plan.out[i] = b[i];
    } else {
      shape_mismatch(op, a, b);
    }
  }
  std::vector<std::size_t> sa(rank), sb(rank);
  std::size_t ra = 1, rb = 1;
  for (std::size_t i = rank; i-- > 0;) {
    sa[i] = a[i] == 1 ? 0 : ra;
    sb[i] = b[i] == 1 ? 0 : rb;
    ra *= a[i];
    rb *= b[i];
  }
  const std::size_t total = shape_size(plan.out);
  plan.a_index.resize(total);
  plan.b_index.resize(total);
  std::vector<std::size_t> idx(rank, 0);
  std::size_t ia = 0, ib = 0;
  for (std::size_t k = 0; k < total; ++k) {
    plan.a_index[k] = ia;
    plan.b_index[k] = ib;
    for (std::size_t d = rank; d-- > 0;) {
      ++idx[d];
      ia += sa[d];
      ib += sb[d];
      if (idx[d] < plan.out[d]) break;
      ia -= sa[d] * idx[d];
      ib -= sb[d] * idx[d];
      idx[d] = 0;
    }
  }
  return plan;
}

enum class BinaryKind { kAdd, kSub, kMul };

Var binary(Var a, Var b, BinaryKind kind, const char* op) {
  Tape& tape = same_tape(a, b);
  const Tensor& va = a.value();
  const Tensor& vb = b.value();
  auto plan = std::make_shared<Broadcast>(plan_broadcast(op, va.shape(), vb.shape()));
  Tensor out(plan->out);
  const std::size_t total = out.size();
  auto ai = [&](std::size_t k) { return plan->trivial ? k : plan->a_index[k]; };
  auto bi = [&](std::size_t k) { return plan->trivial ? k : plan->b_index[k]; };
  for (std::size_t k = 0; k < total; ++k) {
    const double x = va[ai(k)];
    const double y = vb[bi(k)];
    out[k] = kind == BinaryKind::kAdd ? x + y : kind == BinaryKind::kSub ? x - y : x * y;
  }
  const bool req = tape.requires_grad(a) || tape.requires_grad(b);
  const std::size_t ia = a.id(), ib = b.id();
  return tape.record(
      std::move(out), req,
      [ia, ib, plan, kind](Tape& t, const Tensor& g) {
        Tensor* ga = t.grad_buffer(ia);
        Tensor* gb = t.grad_buffer(ib);
        const Tensor& xa = t.value(ia);
        const Tensor& xb = t.value(ib);
        for (std::size_t k = 0; k < g.size(); ++k) {
          const std::size_t i = plan->trivial ? k : plan->a_index[k];
          const std::size_t j = plan->trivial ? k : plan->b_index[k];
          switch (kind) {
            case BinaryKind::kAdd:
              if (ga) (*ga)[i] += g[k];
              if (gb) (*gb)[j] += g[k];
              break;
            case BinaryKind::kSub:
              if (ga) (*ga)[i] += g[k];
              if (gb) (*gb)[j] -= g[k];
              break;
            case BinaryKind::kMul:
              if (ga) (*ga)[i] += g[k] * xb[j];
              if (gb) (*gb)[j] += g[k] * xa[i];
              break;
          }
        }
      },
      op);
}

// y = f(x) elementwise; dfdx(x, y) gives the local derivative.
template <class F, class D>
Var unary(Var a, const char* op, F f, D dfdx) {
  Tape& tape = *a.tape();
  const Tensor& x = a.value();
  Tensor y(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = f(x[i]);
  const std::size_t ia = a.id();
  const bool req = tape.requires_grad(a);
  return tape.record(
      std::move(y), req,
      [ia, dfdx](Tape& t, const Tensor& g) {
        Tensor* ga = t.grad_buffer(ia);
        if (!ga) return;
        const Tensor& xv = t.value(ia);
        for (std::size_t i = 0; i < g.size(); ++i) (*ga)[i] += g[i] * dfdx(xv[i]);
      },
      op);
}

double stable_sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

const Tensor& Var::value() const {
  if (tape_ == nullptr) throw ValidationError("use of an unbound Var");
  return tape_->value(*this);
}

Var Tape::constant(Tensor t) { return record(std::move(t), false, nullptr, "constant"); }

Var Tape::constant_ref(const Tensor& t) {
  Node node;
  node.ref = &t;
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Var Tape::variable(Tensor t) { return record(std::move(t), true, nullptr, "variable"); }

Var Tape::parameter(Parameter& p) {
  Node node;
  node.ref = &p.value;
  node.param = &p;
  node.requires_grad = true;
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Var Tape::record(Tensor value, bool requires_grad, Backward backward, const char* op) {
  if (!value.all_finite()) {
    throw NumericError(std::string("non-finite value produced by ") + op);
  }
  Node node;
  node.value = std::move(value);
  node.requires_grad = requires_grad;
  if (requires_grad) node.backward = std::move(backward);
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

const Tensor& Tape::value(Var v) const { return value(v.id()); }

const Tensor& Tape::value(std::size_t id) const {
  const Node& n = nodes_[id];
  return n.ref ? *n.ref : n.value;
}

const Tensor& Tape::grad(Var v) const { return nodes_[v.id()].grad; }

Tensor* Tape::grad_buffer(std::size_t id) {
  Node& n = nodes_[id];
  if (!n.requires_grad) return nullptr;
  if (n.grad.empty()) n.grad = Tensor(value(id).shape());
  return &n.grad;
}

void Tape::backward(Var loss) {
  if (loss.tape() != this) throw ValidationError("loss Var belongs to another tape");
  if (value(loss).size() != 1) {
    throw ShapeError("backward() needs a scalar loss, got shape " +
                     shape_string(value(loss).shape()));
  }
  Tensor* seed = grad_buffer(loss.id());
  if (!seed) return;
  (*seed)[0] += 1.0;
  for (std::size_t id = loss.id() + 1; id-- > 0;) {
    Node& n = nodes_[id];
    if (n.grad.empty()) continue;
    if (!n.grad.all_finite()) throw NumericError("non-finite gradient during backward pass");
    if (n.backward) n.backward(*this, n.grad);
    if (n.param) {
      auto& dst = n.param->grad;
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += n.grad[i];
    }
  }
}

Var matmul(Var a, Var b) {
  Tape& tape = same_tape(a, b);
  const Tensor& va = a.value();
  const Tensor& vb = b.value();
  if (va.rank() != 2 || vb.rank() != 2 || va.dim(1) != vb.dim(0)) {
    shape_mismatch("matmul", va.shape(), vb.shape());
  }
  const std::size_t m = va.dim(0), k = va.dim(1), n = vb.dim(1);
  Tensor out({m, n});
  as_matrix(out.data(), m, n).noalias() = as_matrix(va.data(), m, k) * as_matrix(vb.data(), k, n);
  const std::size_t ia = a.id(), ib = b.id();
  return tape.record(
      std::move(out), tape.requires_grad(a) || tape.requires_grad(b),
      [ia, ib, m, k, n](Tape& t, const Tensor& g) {
        const auto gm = as_matrix(g.data(), m, n);
        if (Tensor* ga = t.grad_buffer(ia)) {
          as_matrix(ga->data(), m, k).noalias() += gm * as_matrix(t.value(ib).data(), k, n).transpose();
        }
        if (Tensor* gb = t.grad_buffer(ib)) {
          as_matrix(gb->data(), k, n).noalias() += as_matrix(t.value(ia).data(), m, k).transpose() * gm;
        }
      },
      "matmul");
}

Var bmm(Var a, Var b) {
  Tape& tape = same_tape(a, b);
  const Tensor& va = a.value();
  const Tensor& vb = b.value();
  if (va.rank() != 3 || vb.rank() != 3 || va.dim(0) != vb.dim(0) || va.dim(2) != vb.dim(1)) {
    shape_mismatch("bmm", va.shape(), vb.shape());
  }
  const std::size_t batch = va.dim(0), m = va.dim(1), k = va.dim(2), n = vb.dim(2);
  Tensor out({batch, m, n});
  for (std::size_t s = 0; s < batch; ++s) {
    as_matrix(out.data() + s * m * n, m, n).noalias() =
        as_matrix(va.data() + s * m * k, m, k) * as_matrix(vb.data() + s * k * n, k, n);
  }
  const std::size_t ia = a.id(), ib = b.id();
  return tape.record(
      std::move(out), tape.requires_grad(a) || tape.requires_grad(b),
      [ia, ib, batch, m, k, n](Tape& t, const Tensor& g) {
        Tensor* ga = t.grad_buffer(ia);
        Tensor* gb = t.grad_buffer(ib);
        const Tensor& xa = t.value(ia);
        const Tensor& xb = t.value(ib);
        for (std::size_t s = 0; s < batch; ++s) {
          const auto gm = as_matrix(g.data() + s * m * n, m, n);
          if (ga) {
            as_matrix(ga->data() + s * m * k, m, k).noalias() +=
                gm * as_matrix(xb.data() + s * k * n, k, n).transpose();
          }
          if (gb) {
            as_matrix(gb->data() + s * k * n, k, n).noalias() +=
                as_matrix(xa.data() + s * m * k, m, k).transpose() * gm;
          }
        }
      },
      "bmm");
}

Var add(Var a, Var b) { return binary(a, b, BinaryKind::kAdd, "add"); }
Var sub(Var a, Var b) { return binary(a, b, BinaryKind::kSub, "sub"); }
Var mul(Var a, Var b) { return binary(a, b, BinaryKind::kMul, "mul"); }

Var scale(Var a, double factor) {
  return unary(
      a, "scale", [factor](double x) { return factor * x; },
      [factor](double) { return factor; });
}

Var add_scalar(Var a, double offset) {
  return unary(
      a, "add_scalar", [offset](double x) { return x + offset; }, [](double) { return 1.0; });
}

Var square(Var a) {
  return unary(
      a, "square", [](double x) { return x * x; }, [](double x) { return 2.0 * x; });
}

Var sigmoid(Var a) {
  return unary(a, "sigmoid", stable_sigmoid, [](double x) {
    const double s = stable_sigmoid(x);
    return s * (1.0 - s);
  });
}

Var tanh(Var a) {
  return unary(
      a, "tanh", [](double x) { return std::tanh(x); },
      [](double x) {
        const double y = std::tanh(x);
        return 1.0 - y * y;
      });
}

Var exp(Var a) {
  return unary(
      a, "exp", [](double x) { return std::exp(x); }, [](double x) { return std::exp(x); });
}

Var log(Var a) {
  return unary(
      a, "log", [](double x) { return std::log(x); }, [](double x) { return 1.0 / x; });
}

Var clamp(Var a, double lo, double hi) {
  return unary(
      a, "clamp", [lo, hi](double x) { return std::min(std::max(x, lo), hi); },
      [lo, hi](double x) { return (x >= lo && x <= hi) ? 1.0 : 0.0; });
}

Var sum(Var a) {
  Tape& tape = *a.tape();
  const Tensor& x = a.value();
  double s = 0.0;
  for (double v : x.values()) s += v;
  const std::size_t ia = a.id();
  return tape.record(
      Tensor::scalar(s), tape.requires_grad(a),
      [ia](Tape& t, const Tensor& g) {
        Tensor* ga = t.grad_buffer(ia);
        for (double& v : ga->values()) v += g[0];
      },
      "sum");
}

Var mean(Var a) {
  const std::size_t n = a.value().size();
  if (n == 0) throw ShapeError("mean of an empty tensor");
  return scale(sum(a), 1.0 / static_cast<double>(n));
}

Var concat(const std::vector<Var>& parts) {
  if (parts.empty()) throw ShapeError("concat of zero tensors");
  Tape& tape = *parts.front().tape();
  const Shape& first = parts.front().shape();
  if (first.empty()) throw ShapeError("concat needs tensors of rank >= 1");
  Shape lead(first.begin(), first.end() - 1);
  std::vector<std::size_t> widths, ids;
  std::size_t total = 0;
  bool req = false;
  for (const Var& p : parts) {
    if (p.tape() != &tape) throw ValidationError("operands belong to different tapes");
    const Shape& s = p.shape();
    if (s.size() != first.size() || !std::equal(lead.begin(), lead.end(), s.begin())) {
      shape_mismatch("concat", first, s);
    }
    widths.push_back(s.back());
    ids.push_back(p.id());
    total += s.back();
    req = req || tape.requires_grad(p);
  }
  const std::size_t rows = shape_size(lead);
  Shape out_shape = lead;
  out_shape.push_back(total);
  Tensor out(out_shape);
  std::size_t offset = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const Tensor& v = parts[k].value();
    for (std::size_t r = 0; r < rows; ++r) {
      std::copy_n(v.data() + r * widths[k], widths[k], out.data() + r * total + offset);
    }
    offset += widths[k];
  }
  return tape.record(
      std::move(out), req,
      [ids, widths, rows, total](Tape& t, const Tensor& g) {
        std::size_t off = 0;
        for (std::size_t k = 0; k < ids.size(); ++k) {
          if (Tensor* gk = t.grad_buffer(ids[k])) {
            for (std::size_t r = 0; r < rows; ++r) {
              for (std::size_t c = 0; c < widths[k]; ++c) {
                (*gk)[r * widths[k] + c] += g[r * total + off + c];
              }
            }
          }
          off += widths[k];
        }
      },
      "concat");
}

Var slice_last(Var a, std::size_t begin, std::size_t end) {
  Tape& tape = *a.tape();
  const Shape& s = a.shape();
  if (s.empty() || begin > end || end > s.back()) {
    throw ShapeError("slice [" + std::to_string(begin) + ", " + std::to_string(end) +
                     ") out of range for shape " + shape_string(s));
  }
  const std::size_t width = s.back();
  const std::size_t rows = shape_size(s) / (width == 0 ? 1 : width);
  const std::size_t out_width = end - begin;
  Shape out_shape = s;
  out_shape.back() = out_width;
  Tensor out(out_shape);
  const Tensor& x = a.value();
  for (std::size_t r = 0; r < rows; ++r) {
    std::copy_n(x.data() + r * width + begin, out_width, out.data() + r * out_width);
  }
  const std::size_t ia = a.id();
  return tape.record(
      std::move(out), tape.requires_grad(a),
      [ia, rows, width, begin, out_width](Tape& t, const Tensor& g) {
        Tensor* ga = t.grad_buffer(ia);
        for (std::size_t r = 0; r < rows; ++r) {
          for (std::size_t c = 0; c < out_width; ++c) {
            (*ga)[r * width + begin + c] += g[r * out_width + c];
          }
        }
      },
      "slice");
}

Var reshape(Var a, Shape shape) {
  Tape& tape = *a.tape();
  Tensor out = a.value().reshaped(std::move(shape));
  const std::size_t ia = a.id();
  return tape.record(
      std::move(out), tape.requires_grad(a),
      [ia](Tape& t, const Tensor& g) {
        Tensor* ga = t.grad_buffer(ia);
        for (std::size_t i = 0; i < g.size(); ++i) (*ga)[i] += g[i];
      },
      "reshape");
}

}  // namespace graphdis::ad
