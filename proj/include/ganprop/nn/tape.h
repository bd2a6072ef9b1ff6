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

#ifndef GANPROP_NN_TAPE_H_
#define GANPROP_NN_TAPE_H_

#include <span>
#include <vector>

#include "Eigen/Dense"
#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace ganprop::nn {

// Batches are laid out one sample per row.
using Matrix = Eigen::MatrixXd;

enum class OpKind {
  kLeaf,
  kMatMul,
  kTranspose,
  kAdd,
  kSub,
  kMul,
  kScale,
  kAddScalar,
  kAddRow,          // (n x m) + (1 x m) broadcast over rows
  kAddCol,          // (n x m) + (n x 1) broadcast over columns
  kBroadcastRows,   // (1 x m) -> (n x m)
  kBroadcastCols,   // (n x 1) -> (n x m)
  kBroadcastScalar, // (1 x 1) -> (n x m)
  kColSum,          // (n x m) -> (1 x m)
  kRowSum,          // (n x m) -> (n x 1)
  kSumAll,          // (n x m) -> (1 x 1)
  kRelu,
  kLeakyRelu,
  kTanh,
  kSigmoid,
  kSoftmax,         // row-wise
  kLogSoftmax,      // row-wise
  kSoftplus,
  kLog,
  kSqrt,
  kSquare,
  kReciprocal,
};

class Tape;

// Handle to a node on a Tape. Cheap to copy; only valid while its tape lives.
class Var {
 public:
  Var() = default;

  int id() const { return id_; }
  Tape* tape() const { return tape_; }
  bool valid() const { return tape_ != nullptr; }
  const Matrix& value() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  double scalar() const { return value()(0, 0); }

 private:
  friend class Tape;
  Var(Tape* tape, int id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  int id_ = -1;
};

// Reverse-mode differentiation record. Nodes are appended in evaluation
// order, so every node's inputs precede it. Gradients are themselves built
// from tape operations, which makes gradients-of-gradients available (used by
// the WGAN gradient penalty).
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Leaf that participates in differentiation.
  Var Variable(Matrix value);
  // Leaf that is treated as a constant.
  Var Constant(Matrix value);
  Var Scalar(double value) { return Constant(Matrix::Constant(1, 1, value)); }

  // Generic node constructor used by the op free functions below.
  Var Record(OpKind kind, Var a, Var b, double c, Matrix value);

  // Zeroes every gradient buffer, then populates gradient buffers for all
  // nodes that depend on a Variable and feed `root`. Rejects non-scalar roots.
  absl::Status Backward(Var root);

  // Returns d(root)/d(wrt[i]) as tape nodes. With create_graph the returned
  // nodes are themselves differentiable. Rejects non-scalar roots.
  absl::StatusOr<std::vector<Var>> Grad(Var root, std::span<const Var> wrt,
                                        bool create_graph);

  const Matrix& value(Var v) const { return nodes_[v.id_].value; }
  const Matrix& grad(Var v) const { return nodes_[v.id_].grad; }
  OpKind kind(Var v) const { return nodes_[v.id_].kind; }
  bool requires_grad(Var v) const { return nodes_[v.id_].requires_grad; }
  std::vector<int> inputs(Var v) const;
  Var At(int id) { return Var(this, id); }
  size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    OpKind kind = OpKind::kLeaf;
    int a = -1;
    int b = -1;
    double c = 0.0;
    bool requires_grad = false;
    Matrix value;
    Matrix grad;
  };

  // Computes gradient contributions of node `id` given its upstream gradient.
  void Propagate(int id, Var upstream, std::vector<Var>& grads);
  void Accumulate(std::vector<Var>& grads, int target, Var contribution);

  std::vector<Node> nodes_;
  bool recording_grad_ = true;
};

// Elementwise and structural ops. Shapes are checked and violations abort;
// public model APIs validate caller-provided shapes before reaching here.
Var MatMul(Var a, Var b);
Var Transpose(Var a);
Var Add(Var a, Var b);
Var Sub(Var a, Var b);
Var Mul(Var a, Var b);
Var Scale(Var a, double c);
Var AddScalar(Var a, double c);
Var AddRow(Var x, Var row);
Var AddCol(Var x, Var col);
Var BroadcastRows(Var row, Eigen::Index rows);
Var BroadcastCols(Var col, Eigen::Index cols);
Var BroadcastScalar(Var s, Eigen::Index rows, Eigen::Index cols);
Var ColSum(Var a);
Var RowSum(Var a);
Var SumAll(Var a);
Var Mean(Var a);
Var Relu(Var a);
Var LeakyRelu(Var a, double slope);
Var Tanh(Var a);
Var Sigmoid(Var a);
Var Softmax(Var a);
Var LogSoftmax(Var a);
Var Softplus(Var a);
Var Log(Var a);
Var Sqrt(Var a);
Var Square(Var a);
Var Reciprocal(Var a);

inline Var operator+(Var a, Var b) { return Add(a, b); }
inline Var operator-(Var a, Var b) { return Sub(a, b); }
inline Var operator-(Var a) { return Scale(a, -1.0); }

// Numerically stable scalar helpers shared with non-tape code paths.
double StableSigmoid(double x);
double StableSoftplus(double x);

}  // namespace ganprop::nn

#endif  // GANPROP_NN_TAPE_H_
