#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "amg/numerics/tensor.hpp"

namespace amg {

class Tape;

/// Handle to a value recorded on a Tape. Cheap to copy; invalid once the
/// tape is cleared (backward() clears it).
class Var {
 public:
  Var() = default;

  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }
  std::size_t id() const { return id_; }
  Tape* tape() const { return tape_; }

 private:
  friend class Tape;
  friend class Gradients;
  Var(Tape* tape, std::size_t id, std::uint64_t generation) : tape_(tape), id_(id), generation_(generation) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
  std::uint64_t generation_ = 0;
};

/// Gradients of a scalar root with respect to every leaf that requires them.
class Gradients {
 public:
  const Tensor& of(const Var& leaf) const;
  bool contains(const Var& leaf) const;

 private:
  friend class Tape;
  std::uint64_t generation_ = 0;
  std::unordered_map<std::size_t, Tensor> by_node_;
};

/// Reverse-mode tape over Tensor-valued primitives. Nodes are appended in
/// evaluation order, so parents always precede children. One tape belongs
/// to one thread of work.
class Tape {
 public:
  enum class Op : std::uint8_t {
    kLeaf,
    kConstant,
    kAdd,
    kSub,
    kMul,
    kScale,
    kAddScalar,
    kMatMul,
    kSum,
    kMean,
    kTanh,
    kSqrt,
    kLog1p,
    kNorm,
    kDot,
    kDivByScalar,
    kAddRow,
    kConcatCols,
    kGatherRows,
    kFrame,
    kMeanRows,
    kReshape,
  };

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Differentiable input. The `_ref` variants record a reference instead of
  /// a copy; the referenced tensor must outlive the tape's use of it.
  Var leaf(Tensor value);
  Var leaf_ref(const Tensor& value);
  Var constant(Tensor value);
  Var constant_ref(const Tensor& value);

  /// Reverse sweep from a single-element root. Clears the tape afterwards.
  Gradients backward(const Var& root);

  void clear();
  std::size_t size() const { return nodes_.size(); }

 private:
  friend class Var;
  friend Var add(const Var&, const Var&);
  friend Var sub(const Var&, const Var&);
  friend Var mul(const Var&, const Var&);
  friend Var scale(const Var&, double);
  friend Var add_scalar(const Var&, double);
  friend Var matmul(const Var&, const Var&);
  friend Var sum(const Var&);
  friend Var mean(const Var&);
  friend Var tanh(const Var&);
  friend Var sqrt(const Var&);
  friend Var log1p(const Var&);
  friend Var norm(const Var&);
  friend Var dot(const Var&, const Var&);
  friend Var div(const Var&, const Var&);
  friend Var div(const Var&, double);
  friend Var add_row(const Var&, const Var&);
  friend Var concat_cols(std::span<const Var>);
  friend Var gather_rows(const Var&, std::span<const std::size_t>);
  friend Var frame(const Var&, std::size_t, std::size_t);
  friend Var mean_rows(const Var&);
  friend Var reshape(const Var&, Shape);

  struct Node {
    Op op = Op::kConstant;
    std::vector<std::size_t> parents;
    Tensor owned;
    const Tensor* ref = nullptr;
    double scalar = 0.0;
    std::vector<std::size_t> aux;
    bool needs_grad = false;

    const Tensor& value() const { return ref ? *ref : owned; }
  };

  Var push(Node node);
  const Node& node(const Var& v) const;
  void check(const Var& v) const;
  void backprop_node(std::size_t i, const Tensor& g, std::vector<Tensor>& grads, std::vector<bool>& has);

  std::vector<Node> nodes_;
  std::uint64_t generation_ = 1;
};

// Primitives. Operands must live on the same tape.
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);  // elementwise
Var scale(const Var& a, double s);
Var add_scalar(const Var& a, double s);
/// [m,k]x[k,n], [k]x[k,n] -> [n], [m,k]x[k] -> [m].
Var matmul(const Var& a, const Var& b);
Var sum(const Var& a);
Var mean(const Var& a);
Var tanh(const Var& a);
Var sqrt(const Var& a);
Var log1p(const Var& a);
Var norm(const Var& a);
Var dot(const Var& a, const Var& b);
/// Division by a single-element Var; zero divisor is an error.
Var div(const Var& a, const Var& divisor);
Var div(const Var& a, double divisor);
/// Adds a length-c vector to every row of an [r,c] matrix.
Var add_row(const Var& m, const Var& row);
Var concat_cols(std::span<const Var> parts);
Var gather_rows(const Var& table, std::span<const std::size_t> rows);
/// Overlapping frames of a vector: out[f, w] = x[f * hop + w].
Var frame(const Var& x, std::size_t window, std::size_t hop);
/// Column means of an [r,c] matrix -> [c].
Var mean_rows(const Var& m);
Var reshape(const Var& a, Shape shape);

Var cosine_similarity(const Var& a, const Var& b);
Var normalize(const Var& a);

inline Var operator+(const Var& a, const Var& b) { return add(a, b); }
inline Var operator-(const Var& a, const Var& b) { return sub(a, b); }
inline Var operator*(const Var& a, const Var& b) { return mul(a, b); }
inline Var operator*(double s, const Var& a) { return scale(a, s); }
inline Var operator*(const Var& a, double s) { return scale(a, s); }

}  // namespace amg
