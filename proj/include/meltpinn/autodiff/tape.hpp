#pragma once

// Reverse-mode tape over dense Eigen matrices.
//
// Every node holds a full matrix value; a batch of collocation points is
// laid out column-wise, so one recorded operation covers the whole batch.
// The tape is append-only and its insertion order is a topological order,
// so the reverse sweep simply walks the node list backwards.

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "meltpinn/errors.hpp"
#include "meltpinn/network/activation.hpp"

namespace meltpinn::ad {

enum class Op : std::uint8_t {
  Constant,
  Variable,
  Add,
  Sub,
  Neg,
  Mul,      // elementwise product
  Scale,    // multiply by a scalar literal
  Shift,    // add a scalar literal
  MatMul,
  AddBias,  // add a column vector to every column
  Swish,
  SwishD1,
  SwishD2,
  Ramp,     // clamp((x - lo) / (hi - lo), 0, 1)
  Square,
  Sum,      // all entries -> 1x1
  Row,
  HStack,   // [lhs rhs]
};

template <typename Scalar>
class Tape;

// Lightweight handle to a node of a Tape. Copyable; does not own anything.
template <typename Scalar>
class Var {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  Var() = default;
  Var(Tape<Scalar>* tape, int id) : tape_(tape), id_(id) {}

  bool valid() const { return tape_ != nullptr; }
  int id() const { return id_; }
  Tape<Scalar>* tape() const { return tape_; }

  const Matrix& value() const { return tape_->value(*this); }
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  // Convenience for 1x1 nodes.
  Scalar scalar() const { return value()(0, 0); }

 private:
  Tape<Scalar>* tape_ = nullptr;
  int id_ = -1;
};

template <typename Scalar>
class Tape {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using VarT = Var<Scalar>;

  struct Node {
    Op op = Op::Constant;
    int lhs = -1;
    int rhs = -1;
    Scalar p0{};
    Scalar p1{};
    bool needs_grad = false;
    Matrix value;
  };

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  VarT constant(Matrix value) { return push_leaf(Op::Constant, std::move(value), false); }
  VarT constant(Scalar value) { return constant(Matrix::Constant(1, 1, value)); }

  // A leaf that receives adjoints but is not a registered parameter
  // (used for input coordinates in nested-derivative checks).
  VarT variable(Matrix value) { return push_leaf(Op::Variable, std::move(value), true); }

  // A leaf registered under a parameter slot; gradient(slot) reads its adjoint.
  VarT parameter(int slot, Matrix value) {
    require(slot >= 0, "parameter slot must be non-negative");
    if (slot >= static_cast<int>(slots_.size())) slots_.resize(slot + 1, -1);
    require(slots_[slot] < 0, "parameter slot " + std::to_string(slot) + " registered twice");
    VarT v = push_leaf(Op::Variable, std::move(value), true);
    slots_[slot] = v.id();
    return v;
  }

  bool has_slot(int slot) const {
    return slot >= 0 && slot < static_cast<int>(slots_.size()) && slots_[slot] >= 0;
  }

  VarT record(Op op, VarT lhs, VarT rhs = {}, Scalar p0 = Scalar(0), Scalar p1 = Scalar(0)) {
    check_owned(lhs);
    if (rhs.valid()) check_owned(rhs);
    Node node;
    node.op = op;
    node.lhs = lhs.id();
    node.rhs = rhs.valid() ? rhs.id() : -1;
    node.p0 = p0;
    node.p1 = p1;
    node.needs_grad = nodes_[node.lhs].needs_grad || (node.rhs >= 0 && nodes_[node.rhs].needs_grad);
    node.value = evaluate(node, [this](int i) -> const Matrix& { return nodes_[i].value; });
    nodes_.push_back(std::move(node));
    return VarT(this, static_cast<int>(nodes_.size()) - 1);
  }

  const Matrix& value(VarT v) const {
    check_owned(v);
    return nodes_[v.id()].value;
  }

  std::size_t size() const { return nodes_.size(); }
  const Node& node(int id) const { return nodes_.at(id); }

  void clear() {
    nodes_.clear();
    slots_.clear();
    adjoints_.clear();
  }

  // Reverse sweep from a 1x1 root. Each node's local rule runs once, in
  // reverse insertion order.
  void backward(VarT root) {
    check_owned(root);
    require(value(root).rows() == 1 && value(root).cols() == 1,
            "backward() needs a scalar (1x1) root");
    adjoints_.assign(nodes_.size(), Matrix());
    adjoints_[root.id()] = Matrix::Ones(1, 1);
    for (int id = root.id(); id >= 0; --id) {
      const Node& n = nodes_[id];
      if (!n.needs_grad || adjoints_[id].size() == 0) continue;
      propagate(n, adjoints_[id]);
    }
  }

  // Adjoint of any node after backward(); zeros if the node was not reached.
  Matrix adjoint(VarT v) const {
    check_owned(v);
    const Matrix& self = nodes_[v.id()].value;
    if (v.id() >= static_cast<int>(adjoints_.size()) || adjoints_[v.id()].size() == 0)
      return Matrix::Zero(self.rows(), self.cols());
    return adjoints_[v.id()];
  }

  Matrix gradient(int slot) const {
    if (!has_slot(slot))
      throw ContractViolation("gradient requested for unregistered parameter slot " +
                              std::to_string(slot));
    return adjoint(VarT(const_cast<Tape*>(this), slots_[slot]));
  }

  // Recomputes every node from the leaves and reports whether all values
  // match the recorded ones bit-for-bit.
  bool replay_matches() const {
    std::vector<Matrix> fresh(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const Node& n = nodes_[i];
      if (n.op == Op::Constant || n.op == Op::Variable) {
        fresh[i] = n.value;
        continue;
      }
      fresh[i] = evaluate(n, [&fresh](int j) -> const Matrix& { return fresh[j]; });
      if (fresh[i].rows() != n.value.rows() || fresh[i].cols() != n.value.cols()) return false;
      for (Eigen::Index k = 0; k < n.value.size(); ++k) {
        const Scalar a = fresh[i].data()[k];
        const Scalar b = n.value.data()[k];
        if (!(a == b) && !(a != a && b != b)) return false;
      }
    }
    return true;
  }

 private:
  VarT push_leaf(Op op, Matrix value, bool needs_grad) {
    Node node;
    node.op = op;
    node.needs_grad = needs_grad;
    node.value = std::move(value);
    nodes_.push_back(std::move(node));
    return VarT(this, static_cast<int>(nodes_.size()) - 1);
  }

  void check_owned(VarT v) const {
    if (v.tape() != this || v.id() < 0 || v.id() >= static_cast<int>(nodes_.size()))
      throw ContractViolation("variable does not belong to this tape");
  }

  template <typename Lookup>
  static Matrix evaluate(const Node& n, Lookup&& at) {
    const Matrix& a = at(n.lhs);
    auto same_shape = [&](const Matrix& b) {
      require(a.rows() == b.rows() && a.cols() == b.cols(),
              "shape mismatch: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                  " vs " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    };
    switch (n.op) {
      case Op::Add: {
        const Matrix& b = at(n.rhs);
        same_shape(b);
        return a + b;
      }
      case Op::Sub: {
        const Matrix& b = at(n.rhs);
        same_shape(b);
        return a - b;
      }
      case Op::Neg:
        return -a;
      case Op::Mul: {
        const Matrix& b = at(n.rhs);
        same_shape(b);
        return a.cwiseProduct(b);
      }
      case Op::Scale:
        return n.p0 * a;
      case Op::Shift:
        return (a.array() + n.p0).matrix();
      case Op::MatMul: {
        const Matrix& b = at(n.rhs);
        require(a.cols() == b.rows(), "matmul inner dimension mismatch");
        Matrix out(a.rows(), b.cols());
        out.noalias() = a * b;
        return out;
      }
      case Op::AddBias: {
        const Matrix& b = at(n.rhs);
        require(b.cols() == 1 && b.rows() == a.rows(), "bias must be a column matching rows");
        return a.colwise() + b.col(0);
      }
      case Op::Swish:
        return a.unaryExpr([](Scalar x) { return nn::swish(x); });
      case Op::SwishD1:
        return a.unaryExpr([](Scalar x) { return nn::swish_d1(x); });
      case Op::SwishD2:
        return a.unaryExpr([](Scalar x) { return nn::swish_d2(x); });
      case Op::Ramp: {
        const Scalar lo = n.p0, hi = n.p1;
        return a.unaryExpr([lo, hi](Scalar x) {
          if (x <= lo) return Scalar(0);
          if (x >= hi) return Scalar(1);
          return (x - lo) / (hi - lo);
        });
      }
      case Op::Square:
        return a.cwiseProduct(a);
      case Op::Sum:
        return Matrix::Constant(1, 1, a.sum());
      case Op::Row:
        require(n.p0 >= 0 && n.p0 < a.rows(), "row index out of range");
        return a.row(static_cast<Eigen::Index>(n.p0));
      case Op::HStack: {
        const Matrix& b = at(n.rhs);
        require(a.rows() == b.rows(), "hstack row mismatch");
        Matrix out(a.rows(), a.cols() + b.cols());
        out << a, b;
        return out;
      }
      case Op::Constant:
      case Op::Variable:
        break;
    }
    throw ContractViolation("leaf nodes are not evaluated");
  }

  void accumulate(int id, const Matrix& contribution) {
    if (!nodes_[id].needs_grad) return;
    Matrix& slot = adjoints_[id];
    if (slot.size() == 0)
      slot = contribution;
    else
      slot += contribution;
  }

  template <typename Expr>
  void accumulate_expr(int id, const Expr& contribution) {
    if (!nodes_[id].needs_grad) return;
    Matrix& slot = adjoints_[id];
    if (slot.size() == 0)
      slot = contribution;
    else
      slot += contribution;
  }

  void propagate(const Node& n, const Matrix& g) {
    const Matrix& a = nodes_[n.lhs].value;
    switch (n.op) {
      case Op::Add:
        accumulate(n.lhs, g);
        accumulate(n.rhs, g);
        break;
      case Op::Sub:
        accumulate(n.lhs, g);
        accumulate_expr(n.rhs, -g);
        break;
      case Op::Neg:
        accumulate_expr(n.lhs, -g);
        break;
      case Op::Mul: {
        const Matrix& b = nodes_[n.rhs].value;
        accumulate_expr(n.lhs, g.cwiseProduct(b));
        accumulate_expr(n.rhs, g.cwiseProduct(a));
        break;
      }
      case Op::Scale:
        accumulate_expr(n.lhs, n.p0 * g);
        break;
      case Op::Shift:
        accumulate(n.lhs, g);
        break;
      case Op::MatMul: {
        const Matrix& b = nodes_[n.rhs].value;
        if (nodes_[n.lhs].needs_grad) {
          Matrix ga(a.rows(), a.cols());
          ga.noalias() = g * b.transpose();
          accumulate(n.lhs, ga);
        }
        if (nodes_[n.rhs].needs_grad) {
          Matrix gb(b.rows(), b.cols());
          gb.noalias() = a.transpose() * g;
          accumulate(n.rhs, gb);
        }
        break;
      }
      case Op::AddBias:
        accumulate(n.lhs, g);
        accumulate_expr(n.rhs, g.rowwise().sum());
        break;
      case Op::Swish:
        accumulate_expr(n.lhs, g.cwiseProduct(a.unaryExpr([](Scalar x) { return nn::swish_d1(x); })));
        break;
      case Op::SwishD1:
        accumulate_expr(n.lhs, g.cwiseProduct(a.unaryExpr([](Scalar x) { return nn::swish_d2(x); })));
        break;
      case Op::SwishD2:
        accumulate_expr(n.lhs, g.cwiseProduct(a.unaryExpr([](Scalar x) { return nn::swish_d3(x); })));
        break;
      case Op::Ramp: {
        // Closed interval: at the kinks the ramp-side slope is used.
        const Scalar lo = n.p0, hi = n.p1;
        const Scalar slope = Scalar(1) / (hi - lo);
        accumulate_expr(n.lhs, g.cwiseProduct(a.unaryExpr([=](Scalar x) {
          return (x >= lo && x <= hi) ? slope : Scalar(0);
        })));
        break;
      }
      case Op::Square:
        accumulate_expr(n.lhs, Scalar(2) * g.cwiseProduct(a));
        break;
      case Op::Sum:
        accumulate_expr(n.lhs, Matrix::Constant(a.rows(), a.cols(), g(0, 0)));
        break;
      case Op::Row: {
        if (!nodes_[n.lhs].needs_grad) break;
        Matrix full = Matrix::Zero(a.rows(), a.cols());
        full.row(static_cast<Eigen::Index>(n.p0)) = g;
        accumulate(n.lhs, full);
        break;
      }
      case Op::HStack: {
        const Matrix& b = nodes_[n.rhs].value;
        accumulate_expr(n.lhs, g.leftCols(a.cols()));
        accumulate_expr(n.rhs, g.rightCols(b.cols()));
        break;
      }
      case Op::Constant:
      case Op::Variable:
        break;
    }
  }

  std::vector<Node> nodes_;
  std::vector<int> slots_;
  std::vector<Matrix> adjoints_;
};

// ---- expression-style free functions -------------------------------------

template <typename S>
Var<S> operator+(Var<S> a, Var<S> b) { return a.tape()->record(Op::Add, a, b); }
template <typename S>
Var<S> operator-(Var<S> a, Var<S> b) { return a.tape()->record(Op::Sub, a, b); }
template <typename S>
Var<S> operator-(Var<S> a) { return a.tape()->record(Op::Neg, a); }
// Elementwise product; matrix products go through matmul().
template <typename S>
Var<S> operator*(Var<S> a, Var<S> b) { return a.tape()->record(Op::Mul, a, b); }

template <typename S>
Var<S> operator*(Var<S> a, S s) { return a.tape()->record(Op::Scale, a, {}, s); }
template <typename S>
Var<S> operator*(S s, Var<S> a) { return a * s; }
template <typename S>
Var<S> operator/(Var<S> a, S s) { return a * (S(1) / s); }
template <typename S>
Var<S> operator+(Var<S> a, S s) { return a.tape()->record(Op::Shift, a, {}, s); }
template <typename S>
Var<S> operator+(S s, Var<S> a) { return a + s; }
template <typename S>
Var<S> operator-(Var<S> a, S s) { return a + (-s); }
template <typename S>
Var<S> operator-(S s, Var<S> a) { return (-a) + s; }

template <typename S>
Var<S> matmul(Var<S> a, Var<S> b) { return a.tape()->record(Op::MatMul, a, b); }
template <typename S>
Var<S> add_bias(Var<S> x, Var<S> bias) { return x.tape()->record(Op::AddBias, x, bias); }
template <typename S>
Var<S> square(Var<S> a) { return a.tape()->record(Op::Square, a); }
template <typename S>
Var<S> sum(Var<S> a) { return a.tape()->record(Op::Sum, a); }
template <typename S>
Var<S> mean(Var<S> a) {
  require(a.value().size() > 0, "mean of an empty variable");
  return sum(a) * (S(1) / static_cast<S>(a.value().size()));
}
template <typename S>
Var<S> row(Var<S> a, Eigen::Index i) { return a.tape()->record(Op::Row, a, {}, static_cast<S>(i)); }
template <typename S>
Var<S> hstack(Var<S> a, Var<S> b) { return a.tape()->record(Op::HStack, a, b); }
template <typename S>
Var<S> ramp(Var<S> a, S lo, S hi) {
  require(lo < hi, "ramp needs lo < hi");
  return a.tape()->record(Op::Ramp, a, {}, lo, hi);
}
template <typename S>
Var<S> swish(Var<S> a) { return a.tape()->record(Op::Swish, a); }
template <typename S>
Var<S> swish_d1(Var<S> a) { return a.tape()->record(Op::SwishD1, a); }
template <typename S>
Var<S> swish_d2(Var<S> a) { return a.tape()->record(Op::SwishD2, a); }

}  // namespace meltpinn::ad
