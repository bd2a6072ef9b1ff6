// Copyright 2026 The ganprop Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ganprop/nn/tape.h"

#include <cmath>
#include <utility>

#include "absl/strings/str_cat.h"
#include "ganprop/common/check.h"

namespace ganprop::nn {
namespace {

void CheckSameShape(Var a, Var b, const char* op) {
  GANPROP_CHECK(a.tape() == b.tape(), op);
  GANPROP_CHECK(a.rows() == b.rows() && a.cols() == b.cols(), op);
}

Tape& TapeOf(Var v) {
  GANPROP_CHECK(v.valid(), "operation on an unbound Var");
  return *v.tape();
}

}  // namespace

const Matrix& Var::value() const { return tape_->value(*this); }

double StableSigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double StableSoftplus(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

Var Tape::Variable(Matrix value) {
  Node node;
  node.kind = OpKind::kLeaf;
  node.requires_grad = true;
  node.value = std::move(value);
  nodes_.push_back(std::move(node));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Tape::Constant(Matrix value) {
  Node node;
  node.kind = OpKind::kLeaf;
  node.requires_grad = false;
  node.value = std::move(value);
  nodes_.push_back(std::move(node));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Tape::Record(OpKind kind, Var a, Var b, double c, Matrix value) {
  Node node;
  node.kind = kind;
  node.a = a.id_;
  node.b = b.valid() ? b.id_ : -1;
  node.c = c;
  bool rg = nodes_[a.id_].requires_grad;
  if (b.valid()) rg = rg || nodes_[b.id_].requires_grad;
  node.requires_grad = recording_grad_ && rg;
  node.value = std::move(value);
  nodes_.push_back(std::move(node));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

std::vector<int> Tape::inputs(Var v) const {
  std::vector<int> out;
  const Node& n = nodes_[v.id_];
  if (n.a >= 0) out.push_back(n.a);
  if (n.b >= 0) out.push_back(n.b);
  return out;
}

void Tape::Accumulate(std::vector<Var>& grads, int target, Var contribution) {
  if (!nodes_[target].requires_grad) return;
  if (!grads[target].valid()) {
    grads[target] = contribution;
  } else {
    grads[target] = Add(grads[target], contribution);
  }
}

void Tape::Propagate(int id, Var g, std::vector<Var>& grads) {
  // Copy node metadata: recording new nodes may reallocate nodes_.
  const OpKind kind = nodes_[id].kind;
  const int ia = nodes_[id].a;
  const int ib = nodes_[id].b;
  const double c = nodes_[id].c;
  const Var self(this, id);
  const Var a = ia >= 0 ? Var(this, ia) : Var();
  const Var b = ib >= 0 ? Var(this, ib) : Var();
  const bool need_a = ia >= 0 && nodes_[ia].requires_grad;
  const bool need_b = ib >= 0 && nodes_[ib].requires_grad;

  switch (kind) {
    case OpKind::kLeaf:
      return;
    case OpKind::kMatMul:
      if (need_a) Accumulate(grads, ia, MatMul(g, Transpose(b)));
      if (need_b) Accumulate(grads, ib, MatMul(Transpose(a), g));
      return;
    case OpKind::kTranspose:
      if (need_a) Accumulate(grads, ia, Transpose(g));
      return;
    case OpKind::kAdd:
      if (need_a) Accumulate(grads, ia, g);
      if (need_b) Accumulate(grads, ib, g);
      return;
    case OpKind::kSub:
      if (need_a) Accumulate(grads, ia, g);
      if (need_b) Accumulate(grads, ib, Scale(g, -1.0));
      return;
    case OpKind::kMul:
      if (need_a) Accumulate(grads, ia, Mul(g, b));
      if (need_b) Accumulate(grads, ib, Mul(g, a));
      return;
    case OpKind::kScale:
      if (need_a) Accumulate(grads, ia, Scale(g, c));
      return;
    case OpKind::kAddScalar:
      if (need_a) Accumulate(grads, ia, g);
      return;
    case OpKind::kAddRow:
      if (need_a) Accumulate(grads, ia, g);
      if (need_b) Accumulate(grads, ib, ColSum(g));
      return;
    case OpKind::kAddCol:
      if (need_a) Accumulate(grads, ia, g);
      if (need_b) Accumulate(grads, ib, RowSum(g));
      return;
    case OpKind::kBroadcastRows:
      if (need_a) Accumulate(grads, ia, ColSum(g));
      return;
    case OpKind::kBroadcastCols:
      if (need_a) Accumulate(grads, ia, RowSum(g));
      return;
    case OpKind::kBroadcastScalar:
      if (need_a) Accumulate(grads, ia, SumAll(g));
      return;
    case OpKind::kColSum:
      if (need_a) Accumulate(grads, ia, BroadcastRows(g, a.rows()));
      return;
    case OpKind::kRowSum:
      if (need_a) Accumulate(grads, ia, BroadcastCols(g, a.cols()));
      return;
    case OpKind::kSumAll:
      if (need_a) Accumulate(grads, ia, BroadcastScalar(g, a.rows(), a.cols()));
      return;
    case OpKind::kRelu: {
      if (!need_a) return;
      Matrix mask = (a.value().array() > 0.0).cast<double>().matrix();
      Accumulate(grads, ia, Mul(g, Constant(std::move(mask))));
      return;
    }
    case OpKind::kLeakyRelu: {
      if (!need_a) return;
      Matrix mask = (a.value().array() > 0.0).select(1.0, Matrix::Constant(
          a.rows(), a.cols(), c));
      Accumulate(grads, ia, Mul(g, Constant(std::move(mask))));
      return;
    }
    case OpKind::kTanh:
      // 1 - y^2
      if (need_a) {
        Accumulate(grads, ia, Mul(g, AddScalar(Scale(Square(self), -1.0), 1.0)));
      }
      return;
    case OpKind::kSigmoid:
      // y (1 - y)
      if (need_a) {
        Accumulate(grads, ia,
                   Mul(g, Mul(self, AddScalar(Scale(self, -1.0), 1.0))));
      }
      return;
    case OpKind::kSoftmax:
      // y * (g - rowsum(g * y))
      if (need_a) {
        Accumulate(grads, ia,
                   Mul(self, AddCol(g, Scale(RowSum(Mul(g, self)), -1.0))));
      }
      return;
    case OpKind::kLogSoftmax:
      // g - softmax(x) * rowsum(g)
      if (need_a) {
        Accumulate(grads, ia,
                   Sub(g, Mul(Softmax(a), BroadcastCols(RowSum(g), a.cols()))));
      }
      return;
    case OpKind::kSoftplus:
      if (need_a) Accumulate(grads, ia, Mul(g, Sigmoid(a)));
      return;
    case OpKind::kLog:
      if (need_a) Accumulate(grads, ia, Mul(g, Reciprocal(a)));
      return;
    case OpKind::kSqrt:
      if (need_a) Accumulate(grads, ia, Mul(g, Scale(Reciprocal(self), 0.5)));
      return;
    case OpKind::kSquare:
      if (need_a) Accumulate(grads, ia, Mul(g, Scale(a, 2.0)));
      return;
    case OpKind::kReciprocal:
      // d(1/x) = -y^2
      if (need_a) Accumulate(grads, ia, Mul(g, Scale(Square(self), -1.0)));
      return;
  }
}

absl::StatusOr<std::vector<Var>> Tape::Grad(Var root, std::span<const Var> wrt,
                                            bool create_graph) {
  if (root.tape() != this) {
    return absl::InvalidArgumentError("root belongs to a different tape");
  }
  if (root.rows() != 1 || root.cols() != 1) {
    return absl::InvalidArgumentError(absl::StrCat(
        "gradient root must be scalar, got shape ", root.rows(), "x",
        root.cols()));
  }
  for (const Var& w : wrt) {
    if (w.tape() != this) {
      return absl::InvalidArgumentError("gradient target on a different tape");
    }
  }
  const int n = root.id() + 1;
  std::vector<Var> grads(n);
  const bool saved = recording_grad_;
  recording_grad_ = create_graph;
  grads[root.id()] = Constant(Matrix::Ones(1, 1));
  for (int id = n - 1; id >= 0; --id) {
    if (!grads[id].valid() || !nodes_[id].requires_grad) continue;
    Propagate(id, grads[id], grads);
  }
  std::vector<Var> out;
  out.reserve(wrt.size());
  for (const Var& w : wrt) {
    if (w.id() < n && grads[w.id()].valid()) {
      out.push_back(grads[w.id()]);
    } else {
      out.push_back(Constant(Matrix::Zero(w.rows(), w.cols())));
    }
  }
  recording_grad_ = saved;
  return out;
}

absl::Status Tape::Backward(Var root) {
  for (Node& node : nodes_) {
    node.grad = Matrix::Zero(node.value.rows(), node.value.cols());
  }
  std::vector<Var> targets;
  for (int id = 0; id <= root.id() && id < static_cast<int>(nodes_.size());
       ++id) {
    if (nodes_[id].requires_grad) targets.push_back(Var(this, id));
  }
  absl::StatusOr<std::vector<Var>> grads =
      Grad(root, targets, /*create_graph=*/false);
  if (!grads.ok()) return grads.status();
  for (size_t i = 0; i < targets.size(); ++i) {
    nodes_[targets[i].id()].grad = (*grads)[i].value();
  }
  return absl::OkStatus();
}

Var MatMul(Var a, Var b) {
  GANPROP_CHECK(a.cols() == b.rows(), "MatMul inner dimension mismatch");
  Matrix out;
  out.noalias() = a.value() * b.value();
  return TapeOf(a).Record(OpKind::kMatMul, a, b, 0.0, std::move(out));
}

Var Transpose(Var a) {
  return TapeOf(a).Record(OpKind::kTranspose, a, Var(), 0.0,
                          a.value().transpose());
}

Var Add(Var a, Var b) {
  CheckSameShape(a, b, "Add shape mismatch");
  return TapeOf(a).Record(OpKind::kAdd, a, b, 0.0, a.value() + b.value());
}

Var Sub(Var a, Var b) {
  CheckSameShape(a, b, "Sub shape mismatch");
  return TapeOf(a).Record(OpKind::kSub, a, b, 0.0, a.value() - b.value());
}

Var Mul(Var a, Var b) {
  CheckSameShape(a, b, "Mul shape mismatch");
  return TapeOf(a).Record(OpKind::kMul, a, b, 0.0,
                          a.value().cwiseProduct(b.value()));
}

Var Scale(Var a, double c) {
  return TapeOf(a).Record(OpKind::kScale, a, Var(), c, a.value() * c);
}

Var AddScalar(Var a, double c) {
  return TapeOf(a).Record(OpKind::kAddScalar, a, Var(), c,
                          (a.value().array() + c).matrix());
}

Var AddRow(Var x, Var row) {
  GANPROP_CHECK(row.rows() == 1 && row.cols() == x.cols(),
                "AddRow expects a 1 x cols row");
  Matrix out = x.value().rowwise() + row.value().row(0);
  return TapeOf(x).Record(OpKind::kAddRow, x, row, 0.0, std::move(out));
}

Var AddCol(Var x, Var col) {
  GANPROP_CHECK(col.cols() == 1 && col.rows() == x.rows(),
                "AddCol expects a rows x 1 column");
  Matrix out = x.value().colwise() + col.value().col(0);
  return TapeOf(x).Record(OpKind::kAddCol, x, col, 0.0, std::move(out));
}

Var BroadcastRows(Var row, Eigen::Index rows) {
  GANPROP_CHECK(row.rows() == 1, "BroadcastRows expects a single row");
  return TapeOf(row).Record(OpKind::kBroadcastRows, row, Var(), 0.0,
                            row.value().replicate(rows, 1));
}

Var BroadcastCols(Var col, Eigen::Index cols) {
  GANPROP_CHECK(col.cols() == 1, "BroadcastCols expects a single column");
  return TapeOf(col).Record(OpKind::kBroadcastCols, col, Var(), 0.0,
                            col.value().replicate(1, cols));
}

Var BroadcastScalar(Var s, Eigen::Index rows, Eigen::Index cols) {
  GANPROP_CHECK(s.rows() == 1 && s.cols() == 1, "BroadcastScalar expects 1x1");
  return TapeOf(s).Record(OpKind::kBroadcastScalar, s, Var(), 0.0,
                          Matrix::Constant(rows, cols, s.scalar()));
}

Var ColSum(Var a) {
  return TapeOf(a).Record(OpKind::kColSum, a, Var(), 0.0,
                          a.value().colwise().sum());
}

Var RowSum(Var a) {
  return TapeOf(a).Record(OpKind::kRowSum, a, Var(), 0.0,
                          a.value().rowwise().sum());
}

Var SumAll(Var a) {
  return TapeOf(a).Record(OpKind::kSumAll, a, Var(), 0.0,
                          Matrix::Constant(1, 1, a.value().sum()));
}

Var Mean(Var a) {
  return Scale(SumAll(a), 1.0 / static_cast<double>(a.value().size()));
}

Var Relu(Var a) {
  return TapeOf(a).Record(OpKind::kRelu, a, Var(), 0.0,
                          a.value().cwiseMax(0.0));
}

Var LeakyRelu(Var a, double slope) {
  Matrix out = (a.value().array() > 0.0).select(a.value(), a.value() * slope);
  return TapeOf(a).Record(OpKind::kLeakyRelu, a, Var(), slope, std::move(out));
}

Var Tanh(Var a) {
  return TapeOf(a).Record(OpKind::kTanh, a, Var(), 0.0,
                          a.value().array().tanh().matrix());
}

Var Sigmoid(Var a) {
  return TapeOf(a).Record(OpKind::kSigmoid, a, Var(), 0.0,
                          a.value().unaryExpr(&StableSigmoid));
}

Var Softmax(Var a) {
  Matrix out = a.value();
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    const double m = out.row(r).maxCoeff();
    out.row(r) = (out.row(r).array() - m).exp().matrix();
    out.row(r) /= out.row(r).sum();
  }
  return TapeOf(a).Record(OpKind::kSoftmax, a, Var(), 0.0, std::move(out));
}

Var LogSoftmax(Var a) {
  Matrix out = a.value();
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    const double m = out.row(r).maxCoeff();
    const double lse = m + std::log((out.row(r).array() - m).exp().sum());
    out.row(r).array() -= lse;
  }
  return TapeOf(a).Record(OpKind::kLogSoftmax, a, Var(), 0.0, std::move(out));
}

Var Softplus(Var a) {
  return TapeOf(a).Record(OpKind::kSoftplus, a, Var(), 0.0,
                          a.value().unaryExpr(&StableSoftplus));
}

Var Log(Var a) {
  return TapeOf(a).Record(OpKind::kLog, a, Var(), 0.0,
                          a.value().array().log().matrix());
}

Var Sqrt(Var a) {
  return TapeOf(a).Record(OpKind::kSqrt, a, Var(), 0.0,
                          a.value().array().sqrt().matrix());
}

Var Square(Var a) {
  return TapeOf(a).Record(OpKind::kSquare, a, Var(), 0.0,
                          a.value().array().square().matrix());
}

Var Reciprocal(Var a) {
  return TapeOf(a).Record(OpKind::kReciprocal, a, Var(), 0.0,
                          a.value().array().inverse().matrix());
}

}  // namespace ganprop::nn
