// Copyright 2026 The mlasr authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MLASR_TENSOR_HPP_
#define MLASR_TENSOR_HPP_

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mlasr/rng.hpp"

namespace mlasr {
namespace nn {

// Dense row-major matrix of doubles. Doubles keep finite-difference
// gradient checks meaningful; checkpoints narrow to float32 on disk.
struct Tensor {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Tensor() = default;
  Tensor(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, 0.0) {}

  static Tensor Zeros(int r, int c) { return Tensor(r, c); }
  static Tensor Full(int r, int c, double v) {
    Tensor t(r, c);
    std::fill(t.data.begin(), t.data.end(), v);
    return t;
  }
  // Uniform in (-bound, bound).
  static Tensor UniformInit(int r, int c, double bound, Rng& rng) {
    Tensor t(r, c);
    for (double& x : t.data) x = rng.Uniform(-bound, bound);
    return t;
  }

  double& At(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
  double At(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }
  size_t Numel() const { return data.size(); }
  bool SameShape(const Tensor& o) const { return rows == o.rows && cols == o.cols; }
  bool AllFinite() const {
    for (double x : data) {
      if (!std::isfinite(x)) return false;
    }
    return true;
  }
};

// true = attendable. Rows index queries, columns index keys.
struct AttentionMask {
  int rows = 0;
  int cols = 0;
  std::vector<uint8_t> ok;

  AttentionMask() = default;
  AttentionMask(int r, int c, bool value) : rows(r), cols(c), ok(static_cast<size_t>(r) * c, value ? 1 : 0) {}

  bool Ok(int r, int c) const { return ok[static_cast<size_t>(r) * cols + c] != 0; }
  void Set(int r, int c, bool v) { ok[static_cast<size_t>(r) * cols + c] = v ? 1 : 0; }

  // Lower-triangular self-attention mask.
  static AttentionMask Causal(int n) {
    AttentionMask m(n, n, false);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j <= i; ++j) m.Set(i, j, true);
    }
    return m;
  }
  // Every query may attend exactly the keys flagged usable.
  static AttentionMask KeyUsable(int num_queries, const std::vector<uint8_t>& key_ok) {
    AttentionMask m(num_queries, static_cast<int>(key_ok.size()), false);
    for (int i = 0; i < num_queries; ++i) {
      for (int j = 0; j < m.cols; ++j) m.Set(i, j, key_ok[j] != 0);
    }
    return m;
  }
};

// Handle into a Tape.
struct Var {
  int idx = -1;
  bool Valid() const { return idx >= 0; }
};

// Reverse-mode autodiff tape. Ops append nodes; node indices are already a
// topological order, so Backward walks them in reverse. A tape is built,
// differentiated and discarded per optimization step; it is not reusable.
class Tape {
 public:
  struct Node {
    Tensor value;
    Tensor grad;  // allocated by Backward
    bool requires_grad = false;
    std::function<void(Tape&, int)> backprop;  // scatters node grad to parents
  };

  Var Leaf(const Tensor& value, bool requires_grad);

  Var Matmul(Var a, Var b);
  Var Add(Var a, Var b);                 // same shape
  Var AddRowwise(Var a, Var row);        // row: 1 x cols, broadcast over rows
  Var Scale(Var a, double s);
  Var Relu(Var a);
  Var Transpose(Var a);
  Var SliceCols(Var a, int start, int n);
  Var ConcatCols(const std::vector<Var>& parts);
  // Gathers rows of `table` (the embedding matrix) by id.
  Var GatherRows(Var table, const std::vector<int>& ids);
  // y = gain * (x - mean) / sqrt(var + eps) + bias, per row.
  Var LayerNorm(Var x, Var gain, Var bias, double eps = 1e-6);
  // Row-wise softmax restricted to attendable entries; masked entries are
  // exactly zero. A fully-masked row yields an all-zero row and bumps
  // *fully_masked_rows instead of producing NaN.
  Var MaskedSoftmax(Var scores, const AttentionMask* mask, int64_t* fully_masked_rows);
  // Inverted dropout; identity when rate == 0.
  Var Dropout(Var a, double rate, Rng& rng);

  // Label-smoothed cross entropy summed over non-pad positions.
  // q = (1 - eps) * onehot + eps/V uniform over the full vocabulary.
  // Mean reduction divides by the number of non-pad positions.
  Var LabelSmoothedCeSum(Var logits, const std::vector<int>& targets, int pad_id,
                         double label_eps, int64_t* num_positions);

  const Tensor& Value(Var v) const { return nodes_[v.idx].value; }
  const Tensor& Grad(Var v) const { return nodes_[v.idx].grad; }

  // Seeds d(loss)/d(loss) = seed and accumulates gradients into every
  // requires_grad node. `loss` must be 1x1.
  void Backward(Var loss, double seed = 1.0);

  size_t NumNodes() const { return nodes_.size(); }

 private:
  friend struct TapeOps;
  int Emit(Tensor value, bool requires_grad, std::function<void(Tape&, int)> backprop);
  Tensor& GradRef(int idx) { return nodes_[idx].grad; }

  std::vector<Node> nodes_;
};

}  // namespace nn
}  // namespace mlasr

#endif  // MLASR_TENSOR_HPP_
