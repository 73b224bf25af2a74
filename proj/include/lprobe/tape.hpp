#pragma once

// Reverse-mode differentiation over Jet2 scalars. The forward pass records
// elementary operations on an append-only tape; the reverse sweep propagates
// an adjoint triple (one per jet component) through each node exactly once,
// in reverse order. Parameters enter as leaf nodes whose adjoint val-slot is
// the gradient. Leaves survive rewind() so a tape can be reused across many
// quadrature points without re-registering the parameter vector.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "lprobe/errors.hpp"
#include "lprobe/jet.hpp"

namespace lprobe {

class Tape;

class Var {
 public:
  Var() = default;
  Jet2 jet() const;
  Tape* tape() const { return tape_; }
  std::uint32_t index() const { return index_; }

 private:
  friend class Tape;
  Var(Tape* t, std::uint32_t i) : tape_(t), index_(i) {}
  Tape* tape_ = nullptr;
  std::uint32_t index_ = 0;
};

class Tape {
  enum class Op : std::uint8_t {
    Leaf,
    Const,
    Add,
    Sub,
    Neg,
    Mul,
    Madd,   // a*b + c
    Scale,  // aux * a
    Act,    // activation, kind in aux2, sigmoid value cached in aux
    PickVal,
    PickD1,
    PickD2,
  };

  struct Node {
    Jet2 jet;
    double aux = 0.0;
    std::uint32_t a = 0, b = 0, c = 0;
    Op op = Op::Const;
    std::uint8_t aux2 = 0;
  };

 public:
  /// Resets the tape to hold exactly theta.size() leaves with the given
  /// values. Reuses storage when the leaf count is unchanged.
  void init_leaves(std::span<const double> theta) {
    if (nodes_.size() >= theta.size() && num_leaves_ == theta.size()) {
      nodes_.resize(num_leaves_);
      for (std::size_t p = 0; p < theta.size(); ++p)
        nodes_[p].jet = Jet2(theta[p]);
      return;
    }
    nodes_.clear();
    nodes_.reserve(theta.size() + 1024);
    for (double v : theta) {
      Node n;
      n.jet = Jet2(v);
      n.op = Op::Leaf;
      nodes_.push_back(n);
    }
    num_leaves_ = theta.size();
  }

  /// Drops every node recorded after the leaves.
  void rewind() { nodes_.resize(num_leaves_); }

  std::size_t num_leaves() const { return num_leaves_; }
  std::size_t size() const { return nodes_.size(); }

  Var leaf(std::size_t p) {
    if (p >= num_leaves_) throw UsageError("tape: leaf index out of range");
    return Var(this, static_cast<std::uint32_t>(p));
  }

  Var constant(const Jet2& v) {
    Node n;
    n.jet = v;
    n.op = Op::Const;
    return push(n);
  }

  Var add(Var x, Var y) {
    Node n;
    n.jet = at(x) + at(y);
    n.op = Op::Add;
    n.a = x.index_;
    n.b = y.index_;
    return push(n);
  }

  Var sub(Var x, Var y) {
    Node n;
    n.jet = at(x) - at(y);
    n.op = Op::Sub;
    n.a = x.index_;
    n.b = y.index_;
    return push(n);
  }

  Var neg(Var x) {
    Node n;
    n.jet = -at(x);
    n.op = Op::Neg;
    n.a = x.index_;
    return push(n);
  }

  Var mul(Var x, Var y) {
    Node n;
    n.jet = at(x) * at(y);
    n.op = Op::Mul;
    n.a = x.index_;
    n.b = y.index_;
    return push(n);
  }

  Var madd(Var x, Var y, Var z) {
    Node n;
    n.jet = lprobe::madd(at(x), at(y), at(z));
    n.op = Op::Madd;
    n.a = x.index_;
    n.b = y.index_;
    n.c = z.index_;
    return push(n);
  }

  Var scale(Var x, double c) {
    Node n;
    n.jet = c * at(x);
    n.op = Op::Scale;
    n.a = x.index_;
    n.aux = c;
    return push(n);
  }

  Var activation(Activation act, Var x) {
    const Jet2& z = at(x);
    const double s = sigmoid(z.val);
    const ActEval e = act == Activation::Swish ? swish_from_sigmoid(z.val, s)
                                               : sigmoid_from_sigmoid(z.val, s);
    Node n;
    n.jet = apply_eval(e, z);
    n.op = Op::Act;
    n.a = x.index_;
    n.aux = s;
    n.aux2 = static_cast<std::uint8_t>(act);
    return push(n);
  }

  Var pick_val(Var x) {
    Node n;
    n.jet = Jet2(at(x).val);
    n.op = Op::PickVal;
    n.a = x.index_;
    return push(n);
  }

  Var pick_d1(Var x) {
    Node n;
    n.jet = Jet2(at(x).d1);
    n.op = Op::PickD1;
    n.a = x.index_;
    return push(n);
  }

  Var pick_d2(Var x) {
    Node n;
    n.jet = Jet2(at(x).d2);
    n.op = Op::PickD2;
    n.a = x.index_;
    return push(n);
  }

  const Jet2& at(Var v) const { return nodes_[v.index_].jet; }

  /// Recomputes every non-leaf node from its recorded parents. Returns true
  /// when the replay reproduces the stored values bit-exactly, i.e. the tape
  /// records the complete computation.
  bool replay_matches() const {
    std::vector<Jet2> values(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const Node& n = nodes_[i];
      Jet2 jet;
      switch (n.op) {
        case Op::Leaf:
        case Op::Const:
          jet = n.jet;
          break;
        case Op::Add:
          jet = values[n.a] + values[n.b];
          break;
        case Op::Sub:
          jet = values[n.a] - values[n.b];
          break;
        case Op::Neg:
          jet = -values[n.a];
          break;
        case Op::Mul:
          jet = values[n.a] * values[n.b];
          break;
        case Op::Madd:
          jet = lprobe::madd(values[n.a], values[n.b], values[n.c]);
          break;
        case Op::Scale:
          jet = n.aux * values[n.a];
          break;
        case Op::Act: {
          const Jet2& z = values[n.a];
          const double s = sigmoid(z.val);
          const ActEval e =
              static_cast<Activation>(n.aux2) == Activation::Swish
                  ? swish_from_sigmoid(z.val, s)
                  : sigmoid_from_sigmoid(z.val, s);
          jet = apply_eval(e, z);
          break;
        }
        case Op::PickVal:
          jet = Jet2(values[n.a].val);
          break;
        case Op::PickD1:
          jet = Jet2(values[n.a].d1);
          break;
        case Op::PickD2:
          jet = Jet2(values[n.a].d2);
          break;
      }
      values[i] = jet;
      if (jet.val != n.jet.val || jet.d1 != n.jet.d1 || jet.d2 != n.jet.d2)
        return false;
    }
    return true;
  }

  /// Reverse sweep from `out` with initial adjoint `seed` on its value slot.
  /// Adds seed * d(out.val)/d(theta_p) into grad_accum[p].
  void backward(Var out, double seed, std::span<double> grad_accum) {
    if (nodes_.size() <= num_leaves_)
      throw UsageError("tape: backward on an empty tape");
    if (out.tape_ != this || out.index_ >= nodes_.size())
      throw UsageError("tape: output var does not belong to this tape");
    if (grad_accum.size() != num_leaves_)
      throw UsageError("tape: gradient buffer size mismatch");

    adjoint_.assign(nodes_.size(), Jet2{});
    adjoint_[out.index_].val = seed;

    for (std::size_t i = nodes_.size(); i-- > num_leaves_;) {
      const Node& n = nodes_[i];
      const Jet2 ad = adjoint_[i];
      if (ad.val == 0.0 && ad.d1 == 0.0 && ad.d2 == 0.0) continue;
      switch (n.op) {
        case Op::Leaf:
        case Op::Const:
          break;
        case Op::Add: {
          accumulate(n.a, ad);
          accumulate(n.b, ad);
          break;
        }
        case Op::Sub: {
          accumulate(n.a, ad);
          accumulate(n.b, -ad);
          break;
        }
        case Op::Neg: {
          accumulate(n.a, -ad);
          break;
        }
        case Op::Madd: {
          accumulate(n.c, ad);
          [[fallthrough]];
        }
        case Op::Mul: {
          const Jet2& f = nodes_[n.a].jet;
          const Jet2& g = nodes_[n.b].jet;
          mul_adjoint(n.a, ad, g);
          mul_adjoint(n.b, ad, f);
          break;
        }
        case Op::Scale: {
          accumulate(n.a, n.aux * ad);
          break;
        }
        case Op::Act: {
          const Jet2& z = nodes_[n.a].jet;
          const ActEval e =
              static_cast<Activation>(n.aux2) == Activation::Swish
                  ? swish_from_sigmoid(z.val, n.aux)
                  : sigmoid_from_sigmoid(z.val, n.aux);
          Jet2& pa = adjoint_[n.a];
          pa.val += ad.val * e.f1 + ad.d1 * e.f2 * z.d1 +
                    ad.d2 * (e.f3 * z.d1 * z.d1 + e.f2 * z.d2);
          pa.d1 += ad.d1 * e.f1 + ad.d2 * 2.0 * e.f2 * z.d1;
          pa.d2 += ad.d2 * e.f1;
          break;
        }
        case Op::PickVal:
          adjoint_[n.a].val += ad.val;
          break;
        case Op::PickD1:
          adjoint_[n.a].d1 += ad.val;
          break;
        case Op::PickD2:
          adjoint_[n.a].d2 += ad.val;
          break;
      }
    }
    for (std::size_t p = 0; p < num_leaves_; ++p)
      grad_accum[p] += adjoint_[p].val;
  }

 private:
  Var push(Node n) {
    nodes_.push_back(n);
    return Var(this, static_cast<std::uint32_t>(nodes_.size() - 1));
  }

  void accumulate(std::uint32_t idx, const Jet2& ad) {
    Jet2& a = adjoint_[idx];
    a.val += ad.val;
    a.d1 += ad.d1;
    a.d2 += ad.d2;
  }

  // Adjoint of h = f*g into f, with g the co-factor jet:
  //   h.val = f.val g.val, h.d1 = f.d1 g.val + f.val g.d1,
  //   h.d2 = f.d2 g.val + 2 f.d1 g.d1 + f.val g.d2.
  void mul_adjoint(std::uint32_t f_idx, const Jet2& ad, const Jet2& g) {
    Jet2& fa = adjoint_[f_idx];
    fa.val += ad.val * g.val + ad.d1 * g.d1 + ad.d2 * g.d2;
    fa.d1 += ad.d1 * g.val + 2.0 * ad.d2 * g.d1;
    fa.d2 += ad.d2 * g.val;
  }

  std::vector<Node> nodes_;
  std::vector<Jet2> adjoint_;
  std::size_t num_leaves_ = 0;
};

inline Jet2 Var::jet() const { return tape_->at(*this); }

// Operator sugar mirroring the Jet2 value algebra, so generic code can be
// instantiated with either type.
inline Var operator+(Var a, Var b) { return a.tape()->add(a, b); }
inline Var operator-(Var a, Var b) { return a.tape()->sub(a, b); }
inline Var operator-(Var a) { return a.tape()->neg(a); }
inline Var operator*(Var a, Var b) { return a.tape()->mul(a, b); }
inline Var operator*(double c, Var a) { return a.tape()->scale(a, c); }
inline Var operator*(Var a, double c) { return a.tape()->scale(a, c); }
inline Var madd(Var a, Var b, Var c) { return a.tape()->madd(a, b, c); }
inline Var pick_val(Var a) { return a.tape()->pick_val(a); }
inline Var pick_d1(Var a) { return a.tape()->pick_d1(a); }
inline Var pick_d2(Var a) { return a.tape()->pick_d2(a); }
inline Var apply_activation(Activation act, Var a) {
  return a.tape()->activation(act, a);
}

struct GradResult {
  double loss = 0.0;
  std::vector<double> grad;
};

/// Gradient of a scalar expression assembled on a fresh tape. The builder
/// receives the tape and one Var per parameter and returns the output Var.
inline GradResult grad_wrt_params(
    const std::function<Var(Tape&, std::span<const Var>)>& build,
    std::span<const double> theta) {
  Tape tape;
  tape.init_leaves(theta);
  std::vector<Var> leaves;
  leaves.reserve(theta.size());
  for (std::size_t p = 0; p < theta.size(); ++p) leaves.push_back(tape.leaf(p));
  Var out = build(tape, leaves);
  GradResult result;
  result.loss = tape.at(out).val;
  result.grad.assign(theta.size(), 0.0);
  tape.backward(out, 1.0, result.grad);
  return result;
}

}  // namespace lprobe
