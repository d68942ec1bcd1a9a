#include "amg/numerics/tape.hpp"

#include <cmath>
#include <string>

#include "amg/error.hpp"

namespace amg {
namespace {

struct MatView {
  std::size_t rows;
  std::size_t cols;
};

// Rank-1 operands of matmul are treated as a row (left) or column (right).
MatView left_view(const Tensor& t) {
  if (t.rank() == 1) return {1, t.size()};
  if (t.rank() == 2) return {t.shape()[0], t.shape()[1]};
  throw ShapeError("matmul: operand of shape " + shape_string(t.shape()));
}

MatView right_view(const Tensor& t) {
  if (t.rank() == 1) return {t.size(), 1};
  if (t.rank() == 2) return {t.shape()[0], t.shape()[1]};
  throw ShapeError("matmul: operand of shape " + shape_string(t.shape()));
}

void gemm_nn(const double* a, const double* b, double* c, std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = c + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = a[i * k + p];
      const double* brow = b + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

// c[m,k] += g[m,n] * b[k,n]^T, via an explicit transpose so the inner loop is an axpy
void gemm_nt(const double* g, const double* b, double* c, std::size_t m, std::size_t k, std::size_t n) {
  std::vector<double> bt(n * k);
  for (std::size_t p = 0; p < k; ++p)
    for (std::size_t j = 0; j < n; ++j) bt[j * k + p] = b[p * n + j];
  gemm_nn(g, bt.data(), c, m, n, k);
}

// c[k,n] += a[m,k]^T * g[m,n]
void gemm_tn(const double* a, const double* g, double* c, std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* grow = g + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = a[i * k + p];
      if (av == 0.0) continue;
      double* crow = c + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * grow[j];
    }
  }
}

const char* op_name(Tape::Op op) {
  switch (op) {
    case Tape::Op::kLeaf: return "leaf";
    case Tape::Op::kConstant: return "constant";
    case Tape::Op::kAdd: return "add";
    case Tape::Op::kSub: return "sub";
    case Tape::Op::kMul: return "mul";
    case Tape::Op::kScale: return "scale";
    case Tape::Op::kAddScalar: return "add_scalar";
    case Tape::Op::kMatMul: return "matmul";
    case Tape::Op::kSum: return "sum";
    case Tape::Op::kMean: return "mean";
    case Tape::Op::kTanh: return "tanh";
    case Tape::Op::kSqrt: return "sqrt";
    case Tape::Op::kLog1p: return "log1p";
    case Tape::Op::kNorm: return "norm";
    case Tape::Op::kDot: return "dot";
    case Tape::Op::kDivByScalar: return "div";
    case Tape::Op::kAddRow: return "add_row";
    case Tape::Op::kConcatCols: return "concat_cols";
    case Tape::Op::kGatherRows: return "gather_rows";
    case Tape::Op::kFrame: return "frame";
    case Tape::Op::kMeanRows: return "mean_rows";
    case Tape::Op::kReshape: return "reshape";
  }
  return "?";
}

Tape& same_tape(const Var& a, const Var& b) {
  if (a.tape() == nullptr || a.tape() != b.tape()) throw Error("operands recorded on different tapes");
  return *a.tape();
}

Tape& tape_of(const Var& a) {
  if (a.tape() == nullptr) throw Error("operation on an unbound Var");
  return *a.tape();
}

void require_same(const Var& a, const Var& b, const char* what) {
  require_same_shape(a.value(), b.value(), what);
}

}  // namespace

const Tensor& Var::value() const {
  if (tape_ == nullptr) throw Error("value() on an unbound Var");
  return tape_->node(*this).value();
}

const Tensor& Gradients::of(const Var& leaf) const {
  auto it = by_node_.find(leaf.id());
  if (it == by_node_.end() || leaf.generation_ != generation_) {
    throw Error("no gradient recorded for this variable");
  }
  return it->second;
}

bool Gradients::contains(const Var& leaf) const {
  return leaf.generation_ == generation_ && by_node_.count(leaf.id()) != 0;
}

void Tape::check(const Var& v) const {
  if (v.tape_ != this || v.generation_ != generation_ || v.id_ >= nodes_.size()) {
    throw Error("Var does not belong to the current state of this tape");
  }
}

const Tape::Node& Tape::node(const Var& v) const {
  check(v);
  return nodes_[v.id_];
}

Var Tape::push(Node n) {
  if (n.op != Op::kLeaf && n.op != Op::kConstant && !n.owned.all_finite()) {
    throw NumericError(std::string("non-finite result from ") + op_name(n.op));
  }
  if (n.op != Op::kLeaf && n.op != Op::kConstant) {
    for (auto p : n.parents) n.needs_grad = n.needs_grad || nodes_[p].needs_grad;
  }
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1, generation_);
}

Var Tape::leaf(Tensor value) {
  Node n;
  n.op = Op::kLeaf;
  n.owned = std::move(value);
  n.owned.set_requires_grad(true);
  n.needs_grad = true;
  return push(std::move(n));
}

Var Tape::leaf_ref(const Tensor& value) {
  Node n;
  n.op = Op::kLeaf;
  n.ref = &value;
  n.needs_grad = true;
  return push(std::move(n));
}

Var Tape::constant(Tensor value) {
  Node n;
  n.op = Op::kConstant;
  n.owned = std::move(value);
  return push(std::move(n));
}

Var Tape::constant_ref(const Tensor& value) {
  Node n;
  n.op = Op::kConstant;
  n.ref = &value;
  return push(std::move(n));
}

void Tape::clear() {
  nodes_.clear();
  ++generation_;
}

Gradients Tape::backward(const Var& root) {
  check(root);
  if (nodes_[root.id_].value().size() != 1) {
    throw ShapeError("backward() needs a scalar root, got shape " +
                     shape_string(nodes_[root.id_].value().shape()));
  }
  const auto count = root.id_ + 1;
  std::vector<Tensor> grads(count);
  std::vector<bool> has(count, false);
  grads[root.id_] = Tensor(nodes_[root.id_].value().shape(), 1.0);
  has[root.id_] = true;

  for (std::size_t i = count; i-- > 0;) {
    if (!has[i] || !nodes_[i].needs_grad) continue;
    backprop_node(i, grads[i], grads, has);
  }

  Gradients out;
  out.generation_ = generation_;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].op != Op::kLeaf) continue;
    if (i < count && has[i]) {
      out.by_node_.emplace(i, std::move(grads[i]));
    } else {
      out.by_node_.emplace(i, Tensor(nodes_[i].value().shape(), 0.0));
    }
  }
  for (auto& [id, g] : out.by_node_) {
    if (!g.all_finite()) throw NumericError("non-finite gradient");
  }
  // Gradients stay addressable by the Vars that produced them.
  clear();
  return out;
}

void Tape::backprop_node(std::size_t i, const Tensor& g, std::vector<Tensor>& grads, std::vector<bool>& has) {
  const Node& n = nodes_[i];
  auto acc = [&](std::size_t p) -> Tensor& {
    if (!has[p]) {
      grads[p] = Tensor(nodes_[p].value().shape(), 0.0);
      has[p] = true;
    }
    return grads[p];
  };
  auto wants = [&](std::size_t p) { return nodes_[p].needs_grad; };

  switch (n.op) {
    case Op::kLeaf:
    case Op::kConstant:
      break;
    case Op::kAdd:
    case Op::kSub: {
      const double sign = n.op == Op::kAdd ? 1.0 : -1.0;
      if (wants(n.parents[0])) {
        auto& ga = acc(n.parents[0]);
        for (std::size_t k = 0; k < g.size(); ++k) ga[k] += g[k];
      }
      if (wants(n.parents[1])) {
        auto& gb = acc(n.parents[1]);
        for (std::size_t k = 0; k < g.size(); ++k) gb[k] += sign * g[k];
      }
      break;
    }
    case Op::kMul: {
      const auto& a = nodes_[n.parents[0]].value();
      const auto& b = nodes_[n.parents[1]].value();
      if (wants(n.parents[0])) {
        auto& ga = acc(n.parents[0]);
        for (std::size_t k = 0; k < g.size(); ++k) ga[k] += g[k] * b[k];
      }
      if (wants(n.parents[1])) {
        auto& gb = acc(n.parents[1]);
        for (std::size_t k = 0; k < g.size(); ++k) gb[k] += g[k] * a[k];
      }
      break;
    }
    case Op::kScale: {
      auto& ga = acc(n.parents[0]);
      for (std::size_t k = 0; k < g.size(); ++k) ga[k] += n.scalar * g[k];
      break;
    }
    case Op::kAddScalar:
    case Op::kReshape: {
      auto& ga = acc(n.parents[0]);
      for (std::size_t k = 0; k < g.size(); ++k) ga[k] += g[k];
      break;
    }
    case Op::kMatMul: {
      const auto& a = nodes_[n.parents[0]].value();
      const auto& b = nodes_[n.parents[1]].value();
      const auto av = left_view(a);
      const auto bv = right_view(b);
      if (wants(n.parents[0])) {
        gemm_nt(g.data().data(), b.data().data(), acc(n.parents[0]).data().data(), av.rows, av.cols, bv.cols);
      }
      if (wants(n.parents[1])) {
        gemm_tn(a.data().data(), g.data().data(), acc(n.parents[1]).data().data(), av.rows, av.cols, bv.cols);
      }
      break;
    }
    case Op::kSum:
    case Op::kMean: {
      auto& ga = acc(n.parents[0]);
      const double s = n.op == Op::kSum ? g.item() : g.item() / static_cast<double>(ga.size());
      for (auto& v : ga.data()) v += s;
      break;
    }
    case Op::kTanh: {
      const auto& y = n.value();
      auto& ga = acc(n.parents[0]);
      for (std::size_t k = 0; k < g.size(); ++k) ga[k] += g[k] * (1.0 - y[k] * y[k]);
      break;
    }
    case Op::kSqrt: {
      const auto& y = n.value();
      auto& ga = acc(n.parents[0]);
      for (std::size_t k = 0; k < g.size(); ++k) {
        if (y[k] == 0.0) throw NumericError("sqrt gradient at zero");
        ga[k] += g[k] / (2.0 * y[k]);
      }
      break;
    }
    case Op::kLog1p: {
      const auto& x = nodes_[n.parents[0]].value();
      auto& ga = acc(n.parents[0]);
      for (std::size_t k = 0; k < g.size(); ++k) ga[k] += g[k] / (1.0 + x[k]);
      break;
    }
    case Op::kNorm: {
      const auto& x = nodes_[n.parents[0]].value();
      const double y = n.value().item();
      if (y == 0.0) throw NumericError("norm gradient at zero");
      auto& ga = acc(n.parents[0]);
      const double s = g.item() / y;
      for (std::size_t k = 0; k < x.size(); ++k) ga[k] += s * x[k];
      break;
    }
    case Op::kDot: {
      const auto& a = nodes_[n.parents[0]].value();
      const auto& b = nodes_[n.parents[1]].value();
      const double s = g.item();
      if (wants(n.parents[0])) {
        auto& ga = acc(n.parents[0]);
        for (std::size_t k = 0; k < a.size(); ++k) ga[k] += s * b[k];
      }
      if (wants(n.parents[1])) {
        auto& gb = acc(n.parents[1]);
        for (std::size_t k = 0; k < a.size(); ++k) gb[k] += s * a[k];
      }
      break;
    }
    case Op::kDivByScalar: {
      const auto& a = nodes_[n.parents[0]].value();
      const double d = nodes_[n.parents[1]].value().item();
      if (wants(n.parents[0])) {
        auto& ga = acc(n.parents[0]);
        for (std::size_t k = 0; k < a.size(); ++k) ga[k] += g[k] / d;
      }
      if (wants(n.parents[1])) {
        double s = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) s += g[k] * a[k];
        acc(n.parents[1])[0] -= s / (d * d);
      }
      break;
    }
    case Op::kAddRow: {
      const auto cols = n.value().shape()[1];
      const auto rows = n.value().shape()[0];
      if (wants(n.parents[0])) {
        auto& gm = acc(n.parents[0]);
        for (std::size_t k = 0; k < g.size(); ++k) gm[k] += g[k];
      }
      if (wants(n.parents[1])) {
        auto& gr = acc(n.parents[1]);
        for (std::size_t r = 0; r < rows; ++r)
          for (std::size_t c = 0; c < cols; ++c) gr[c] += g[r * cols + c];
      }
      break;
    }
    case Op::kConcatCols: {
      const auto rows = n.value().shape()[0];
      const auto total = n.value().shape()[1];
      std::size_t offset = 0;
      for (std::size_t p = 0; p < n.parents.size(); ++p) {
        const auto width = n.aux[p];
        if (wants(n.parents[p])) {
          auto& gp = acc(n.parents[p]);
          for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < width; ++c) gp[r * width + c] += g[r * total + offset + c];
        }
        offset += width;
      }
      break;
    }
    case Op::kGatherRows: {
      const auto cols = n.value().shape()[1];
      auto& gt = acc(n.parents[0]);
      for (std::size_t r = 0; r < n.aux.size(); ++r)
        for (std::size_t c = 0; c < cols; ++c) gt[n.aux[r] * cols + c] += g[r * cols + c];
      break;
    }
    case Op::kFrame: {
      const auto frames = n.value().shape()[0];
      const auto window = n.value().shape()[1];
      const auto hop = n.aux[0];
      auto& gx = acc(n.parents[0]);
      for (std::size_t f = 0; f < frames; ++f)
        for (std::size_t w = 0; w < window; ++w) gx[f * hop + w] += g[f * window + w];
      break;
    }
    case Op::kMeanRows: {
      auto& gm = acc(n.parents[0]);
      const auto rows = nodes_[n.parents[0]].value().shape()[0];
      const auto cols = g.size();
      const double inv = 1.0 / static_cast<double>(rows);
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) gm[r * cols + c] += g[c] * inv;
      break;
    }
  }
}

Var add(const Var& a, const Var& b) {
  auto& tape = same_tape(a, b);
  require_same(a, b, "add");
  Tape::Node n;
  n.op = Tape::Op::kAdd;
  n.parents = {a.id(), b.id()};
  n.owned = a.value() + b.value();
  return tape.push(std::move(n));
}

Var sub(const Var& a, const Var& b) {
  auto& tape = same_tape(a, b);
  require_same(a, b, "subtract");
  Tape::Node n;
  n.op = Tape::Op::kSub;
  n.parents = {a.id(), b.id()};
  n.owned = a.value() - b.value();
  return tape.push(std::move(n));
}

Var mul(const Var& a, const Var& b) {
  auto& tape = same_tape(a, b);
  require_same(a, b, "multiply");
  Tape::Node n;
  n.op = Tape::Op::kMul;
  n.parents = {a.id(), b.id()};
  n.owned = hadamard(a.value(), b.value());
  return tape.push(std::move(n));
}

Var scale(const Var& a, double s) {
  auto& tape = tape_of(a);
  Tape::Node n;
  n.op = Tape::Op::kScale;
  n.parents = {a.id()};
  n.scalar = s;
  n.owned = s * a.value();
  return tape.push(std::move(n));
}

Var add_scalar(const Var& a, double s) {
  auto& tape = tape_of(a);
  Tape::Node n;
  n.op = Tape::Op::kAddScalar;
  n.parents = {a.id()};
  n.scalar = s;
  n.owned = a.value();
  for (auto& v : n.owned.data()) v += s;
  return tape.push(std::move(n));
}

Var matmul(const Var& a, const Var& b) {
  auto& tape = same_tape(a, b);
  const auto& av = a.value();
  const auto& bv = b.value();
  const auto lv = left_view(av);
  const auto rv = right_view(bv);
  if (lv.cols != rv.rows) {
    throw ShapeError("matmul: inner dimensions differ " + shape_string(av.shape()) + " x " +
                     shape_string(bv.shape()));
  }
  Shape out_shape;
  if (av.rank() == 2) out_shape.push_back(lv.rows);
  if (bv.rank() == 2) out_shape.push_back(rv.cols);
  Tape::Node n;
  n.op = Tape::Op::kMatMul;
  n.parents = {a.id(), b.id()};
  n.owned = Tensor(out_shape, 0.0);
  gemm_nn(av.data().data(), bv.data().data(), n.owned.data().data(), lv.rows, lv.cols, rv.cols);
  return tape.push(std::move(n));
}

Var sum(const Var& a) {
  auto& tape = tape_of(a);
  double s = 0.0;
  for (double v : a.value().data()) s += v;
  Tape::Node n;
  n.op = Tape::Op::kSum;
  n.parents = {a.id()};
  n.owned = Tensor::scalar(s);
  return tape.push(std::move(n));
}

Var mean(const Var& a) {
  auto& tape = tape_of(a);
  double s = 0.0;
  for (double v : a.value().data()) s += v;
  Tape::Node n;
  n.op = Tape::Op::kMean;
  n.parents = {a.id()};
  n.owned = Tensor::scalar(s / static_cast<double>(a.value().size()));
  return tape.push(std::move(n));
}

Var tanh(const Var& a) {
  auto& tape = tape_of(a);
  Tape::Node n;
  n.op = Tape::Op::kTanh;
  n.parents = {a.id()};
  n.owned = a.value();
  for (auto& v : n.owned.data()) v = std::tanh(v);
  return tape.push(std::move(n));
}

Var sqrt(const Var& a) {
  auto& tape = tape_of(a);
  Tape::Node n;
  n.op = Tape::Op::kSqrt;
  n.parents = {a.id()};
  n.owned = a.value();
  for (auto& v : n.owned.data()) {
    if (v < 0.0) throw NumericError("sqrt of a negative value");
    v = std::sqrt(v);
  }
  return tape.push(std::move(n));
}

Var log1p(const Var& a) {
  auto& tape = tape_of(a);
  Tape::Node n;
  n.op = Tape::Op::kLog1p;
  n.parents = {a.id()};
  n.owned = a.value();
  for (auto& v : n.owned.data()) {
    if (v <= -1.0) throw NumericError("log1p of a value <= -1");
    v = std::log1p(v);
  }
  return tape.push(std::move(n));
}

Var norm(const Var& a) {
  auto& tape = tape_of(a);
  Tape::Node n;
  n.op = Tape::Op::kNorm;
  n.parents = {a.id()};
  n.owned = Tensor::scalar(amg::norm(a.value()));
  return tape.push(std::move(n));
}

Var dot(const Var& a, const Var& b) {
  auto& tape = same_tape(a, b);
  if (a.value().size() != b.value().size()) throw ShapeError("dot: length mismatch");
  Tape::Node n;
  n.op = Tape::Op::kDot;
  n.parents = {a.id(), b.id()};
  n.owned = Tensor::scalar(amg::dot(a.value(), b.value()));
  return tape.push(std::move(n));
}

Var div(const Var& a, const Var& divisor) {
  auto& tape = same_tape(a, divisor);
  const double d = divisor.value().item();
  if (d == 0.0) throw NumericError("division by zero");
  Tape::Node n;
  n.op = Tape::Op::kDivByScalar;
  n.parents = {a.id(), divisor.id()};
  n.owned = a.value();
  for (auto& v : n.owned.data()) v /= d;
  return tape.push(std::move(n));
}

Var div(const Var& a, double divisor) {
  auto& tape = tape_of(a);
  if (divisor == 0.0) throw NumericError("division by zero");
  // Recorded as a scale for the backward pass; the forward value divides so
  // it matches plain Tensor code bit for bit.
  Tape::Node n;
  n.op = Tape::Op::kScale;
  n.parents = {a.id()};
  n.scalar = 1.0 / divisor;
  n.owned = a.value();
  for (auto& v : n.owned.data()) v /= divisor;
  return tape.push(std::move(n));
}

Var add_row(const Var& m, const Var& row) {
  auto& tape = same_tape(m, row);
  const auto& mv = m.value();
  const auto& rv = row.value();
  if (mv.rank() != 2 || rv.rank() != 1 || mv.shape()[1] != rv.size()) {
    throw ShapeError("add_row: " + shape_string(mv.shape()) + " + " + shape_string(rv.shape()));
  }
  Tape::Node n;
  n.op = Tape::Op::kAddRow;
  n.parents = {m.id(), row.id()};
  n.owned = mv;
  const auto cols = rv.size();
  for (std::size_t k = 0; k < n.owned.size(); ++k) n.owned[k] += rv[k % cols];
  return tape.push(std::move(n));
}

Var concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw ShapeError("concat_cols: nothing to concatenate");
  auto& tape = tape_of(parts.front());
  const auto rows = parts.front().value().rank() == 2 ? parts.front().value().shape()[0] : 0;
  std::size_t total = 0;
  Tape::Node n;
  n.op = Tape::Op::kConcatCols;
  for (const auto& p : parts) {
    if (p.tape() != &tape) throw Error("operands recorded on different tapes");
    const auto& v = p.value();
    if (v.rank() != 2 || v.shape()[0] != rows) throw ShapeError("concat_cols: row counts differ");
    n.parents.push_back(p.id());
    n.aux.push_back(v.shape()[1]);
    total += v.shape()[1];
  }
  n.owned = Tensor(Shape{rows, total});
  std::size_t offset = 0;
  for (const auto& p : parts) {
    const auto& v = p.value();
    const auto width = v.shape()[1];
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < width; ++c) n.owned[r * total + offset + c] = v[r * width + c];
    offset += width;
  }
  return tape.push(std::move(n));
}

Var gather_rows(const Var& table, std::span<const std::size_t> rows) {
  auto& tape = tape_of(table);
  const auto& tv = table.value();
  if (tv.rank() != 2) throw ShapeError("gather_rows: table must be a matrix");
  const auto cols = tv.shape()[1];
  Tape::Node n;
  n.op = Tape::Op::kGatherRows;
  n.parents = {table.id()};
  n.aux.assign(rows.begin(), rows.end());
  n.owned = Tensor(Shape{rows.size(), cols});
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= tv.shape()[0]) throw DomainError("gather_rows: row index out of range");
    for (std::size_t c = 0; c < cols; ++c) n.owned[r * cols + c] = tv[rows[r] * cols + c];
  }
  return tape.push(std::move(n));
}

Var frame(const Var& x, std::size_t window, std::size_t hop) {
  auto& tape = tape_of(x);
  const auto& xv = x.value();
  if (xv.rank() != 1) throw ShapeError("frame: input must be a vector");
  if (window == 0 || hop == 0 || window > xv.size()) throw DomainError("frame: bad window/hop");
  const auto frames = (xv.size() - window) / hop + 1;
  Tape::Node n;
  n.op = Tape::Op::kFrame;
  n.parents = {x.id()};
  n.aux = {hop};
  n.owned = Tensor(Shape{frames, window});
  for (std::size_t f = 0; f < frames; ++f)
    for (std::size_t w = 0; w < window; ++w) n.owned[f * window + w] = xv[f * hop + w];
  return tape.push(std::move(n));
}

Var mean_rows(const Var& m) {
  auto& tape = tape_of(m);
  const auto& mv = m.value();
  if (mv.rank() != 2) throw ShapeError("mean_rows: input must be a matrix");
  const auto rows = mv.shape()[0];
  const auto cols = mv.shape()[1];
  Tape::Node n;
  n.op = Tape::Op::kMeanRows;
  n.parents = {m.id()};
  n.owned = Tensor(Shape{cols});
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) n.owned[c] += mv[r * cols + c];
  for (auto& v : n.owned.data()) v /= static_cast<double>(rows);
  return tape.push(std::move(n));
}

Var reshape(const Var& a, Shape shape) {
  auto& tape = tape_of(a);
  Tape::Node n;
  n.op = Tape::Op::kReshape;
  n.parents = {a.id()};
  n.owned = a.value().reshaped(std::move(shape));
  return tape.push(std::move(n));
}

Var cosine_similarity(const Var& a, const Var& b) {
  return div(dot(a, b), mul(norm(a), norm(b)));
}

Var normalize(const Var& a) { return div(a, norm(a)); }

}  // namespace amg
