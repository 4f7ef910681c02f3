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

#include "mlasr/tensor.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <utility>

#include "mlasr/common.hpp"

namespace mlasr {
namespace nn {

namespace {

using EMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const EMat> M(const Tensor& t) {
  return Eigen::Map<const EMat>(t.data.data(), t.rows, t.cols);
}
Eigen::Map<EMat> M(Tensor& t) {
  return Eigen::Map<EMat>(t.data.data(), t.rows, t.cols);
}

void CheckShape(bool ok, const char* what) {
  if (!ok) throw DataError(std::string("tensor shape mismatch in ") + what);
}

}  // namespace

int Tape::Emit(Tensor value, bool requires_grad, std::function<void(Tape&, int)> backprop) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = requires_grad;
  n.backprop = std::move(backprop);
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

Var Tape::Leaf(const Tensor& value, bool requires_grad) {
  return {Emit(value, requires_grad, nullptr)};
}

Var Tape::Matmul(Var a, Var b) {
  const Tensor& ta = nodes_[a.idx].value;
  const Tensor& tb = nodes_[b.idx].value;
  CheckShape(ta.cols == tb.rows, "matmul");
  Tensor out(ta.rows, tb.cols);
  M(out).noalias() = M(ta) * M(tb);
  bool rg = nodes_[a.idx].requires_grad || nodes_[b.idx].requires_grad;
  int ai = a.idx, bi = b.idx;
  return {Emit(std::move(out), rg, [ai, bi](Tape& t, int self) {
    const Tensor& g = t.nodes_[self].grad;
    if (t.nodes_[ai].requires_grad) {
      M(t.GradRef(ai)).noalias() += M(g) * M(t.nodes_[bi].value).transpose();
    }
    if (t.nodes_[bi].requires_grad) {
      M(t.GradRef(bi)).noalias() += M(t.nodes_[ai].value).transpose() * M(g);
    }
  })};
}

Var Tape::Add(Var a, Var b) {
  const Tensor& ta = nodes_[a.idx].value;
  const Tensor& tb = nodes_[b.idx].value;
  CheckShape(ta.SameShape(tb), "add");
  Tensor out = ta;
  for (size_t i = 0; i < out.data.size(); ++i) out.data[i] += tb.data[i];
  bool rg = nodes_[a.idx].requires_grad || nodes_[b.idx].requires_grad;
  int ai = a.idx, bi = b.idx;
  return {Emit(std::move(out), rg, [ai, bi](Tape& t, int self) {
    const Tensor& g = t.nodes_[self].grad;
    for (int p : {ai, bi}) {
      if (!t.nodes_[p].requires_grad) continue;
      Tensor& pg = t.GradRef(p);
      for (size_t i = 0; i < g.data.size(); ++i) pg.data[i] += g.data[i];
    }
  })};
}

Var Tape::AddRowwise(Var a, Var row) {
  const Tensor& ta = nodes_[a.idx].value;
  const Tensor& tr = nodes_[row.idx].value;
  CheckShape(tr.rows == 1 && tr.cols == ta.cols, "add_rowwise");
  Tensor out = ta;
  for (int r = 0; r < out.rows; ++r) {
    for (int c = 0; c < out.cols; ++c) out.At(r, c) += tr.At(0, c);
  }
  bool rg = nodes_[a.idx].requires_grad || nodes_[row.idx].requires_grad;
  int ai = a.idx, ri = row.idx;
  return {Emit(std::move(out), rg, [ai, ri](Tape& t, int self) {
    const Tensor& g = t.nodes_[self].grad;
    if (t.nodes_[ai].requires_grad) {
      Tensor& pg = t.GradRef(ai);
      for (size_t i = 0; i < g.data.size(); ++i) pg.data[i] += g.data[i];
    }
    if (t.nodes_[ri].requires_grad) {
      Tensor& rg2 = t.GradRef(ri);
      for (int r = 0; r < g.rows; ++r) {
        for (int c = 0; c < g.cols; ++c) rg2.At(0, c) += g.At(r, c);
      }
    }
  })};
}

Var Tape::Scale(Var a, double s) {
  Tensor out = nodes_[a.idx].value;
  for (double& x : out.data) x *= s;
  int ai = a.idx;
  return {Emit(std::move(out), nodes_[a.idx].requires_grad, [ai, s](Tape& t, int self) {
    if (!t.nodes_[ai].requires_grad) return;
    const Tensor& g = t.nodes_[self].grad;
    Tensor& pg = t.GradRef(ai);
    for (size_t i = 0; i < g.data.size(); ++i) pg.data[i] += s * g.data[i];
  })};
}

Var Tape::Relu(Var a) {
  Tensor out = nodes_[a.idx].value;
  for (double& x : out.data) x = x > 0.0 ? x : 0.0;
  int ai = a.idx;
  return {Emit(std::move(out), nodes_[a.idx].requires_grad, [ai](Tape& t, int self) {
    if (!t.nodes_[ai].requires_grad) return;
    const Tensor& g = t.nodes_[self].grad;
    const Tensor& in = t.nodes_[ai].value;
    Tensor& pg = t.GradRef(ai);
    for (size_t i = 0; i < g.data.size(); ++i) {
      if (in.data[i] > 0.0) pg.data[i] += g.data[i];
    }
  })};
}

Var Tape::Transpose(Var a) {
  const Tensor& ta = nodes_[a.idx].value;
  Tensor out(ta.cols, ta.rows);
  M(out) = M(ta).transpose();
  int ai = a.idx;
  return {Emit(std::move(out), nodes_[a.idx].requires_grad, [ai](Tape& t, int self) {
    if (!t.nodes_[ai].requires_grad) return;
    M(t.GradRef(ai)) += M(t.nodes_[self].grad).transpose();
  })};
}

Var Tape::SliceCols(Var a, int start, int n) {
  const Tensor& ta = nodes_[a.idx].value;
  CheckShape(start >= 0 && n >= 1 && start + n <= ta.cols, "slice_cols");
  Tensor out(ta.rows, n);
  for (int r = 0; r < ta.rows; ++r) {
    for (int c = 0; c < n; ++c) out.At(r, c) = ta.At(r, start + c);
  }
  int ai = a.idx;
  return {Emit(std::move(out), nodes_[a.idx].requires_grad, [ai, start, n](Tape& t, int self) {
    if (!t.nodes_[ai].requires_grad) return;
    const Tensor& g = t.nodes_[self].grad;
    Tensor& pg = t.GradRef(ai);
    for (int r = 0; r < g.rows; ++r) {
      for (int c = 0; c < n; ++c) pg.At(r, start + c) += g.At(r, c);
    }
  })};
}

Var Tape::ConcatCols(const std::vector<Var>& parts) {
  CheckShape(!parts.empty(), "concat_cols");
  int rows = nodes_[parts[0].idx].value.rows;
  int cols = 0;
  bool rg = false;
  for (Var p : parts) {
    CheckShape(nodes_[p.idx].value.rows == rows, "concat_cols");
    cols += nodes_[p.idx].value.cols;
    rg = rg || nodes_[p.idx].requires_grad;
  }
  Tensor out(rows, cols);
  int at = 0;
  std::vector<int> parent_idx;
  std::vector<int> offsets;
  for (Var p : parts) {
    const Tensor& tp = nodes_[p.idx].value;
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < tp.cols; ++c) out.At(r, at + c) = tp.At(r, c);
    }
    parent_idx.push_back(p.idx);
    offsets.push_back(at);
    at += tp.cols;
  }
  return {Emit(std::move(out), rg, [parent_idx, offsets](Tape& t, int self) {
    const Tensor& g = t.nodes_[self].grad;
    for (size_t k = 0; k < parent_idx.size(); ++k) {
      int pi = parent_idx[k];
      if (!t.nodes_[pi].requires_grad) continue;
      Tensor& pg = t.GradRef(pi);
      for (int r = 0; r < g.rows; ++r) {
        for (int c = 0; c < pg.cols; ++c) pg.At(r, c) += g.At(r, offsets[k] + c);
      }
    }
  })};
}

Var Tape::GatherRows(Var table, const std::vector<int>& ids) {
  const Tensor& tt = nodes_[table.idx].value;
  Tensor out(static_cast<int>(ids.size()), tt.cols);
  for (size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= tt.rows) {
      throw DataError("gather_rows: id out of range: " + std::to_string(ids[i]));
    }
    for (int c = 0; c < tt.cols; ++c) out.At(static_cast<int>(i), c) = tt.At(ids[i], c);
  }
  int ti = table.idx;
  std::vector<int> ids_copy = ids;
  return {Emit(std::move(out), nodes_[table.idx].requires_grad,
               [ti, ids_copy](Tape& t, int self) {
    if (!t.nodes_[ti].requires_grad) return;
    const Tensor& g = t.nodes_[self].grad;
    Tensor& pg = t.GradRef(ti);
    for (int r = 0; r < g.rows; ++r) {
      for (int c = 0; c < g.cols; ++c) pg.At(ids_copy[r], c) += g.At(r, c);
    }
  })};
}

Var Tape::LayerNorm(Var x, Var gain, Var bias, double eps) {
  const Tensor& tx = nodes_[x.idx].value;
  const Tensor& tg = nodes_[gain.idx].value;
  const Tensor& tb = nodes_[bias.idx].value;
  CheckShape(tg.rows == 1 && tg.cols == tx.cols, "layer_norm gain");
  CheckShape(tb.rows == 1 && tb.cols == tx.cols, "layer_norm bias");
  const int d = tx.cols;
  Tensor out(tx.rows, d);
  Tensor xhat(tx.rows, d);
  std::vector<double> inv_std(tx.rows);
  for (int r = 0; r < tx.rows; ++r) {
    double mean = 0.0;
    for (int c = 0; c < d; ++c) mean += tx.At(r, c);
    mean /= d;
    double var = 0.0;
    for (int c = 0; c < d; ++c) {
      double dv = tx.At(r, c) - mean;
      var += dv * dv;
    }
    var /= d;
    double inv = 1.0 / std::sqrt(var + eps);
    inv_std[r] = inv;
    for (int c = 0; c < d; ++c) {
      double xh = (tx.At(r, c) - mean) * inv;
      xhat.At(r, c) = xh;
      out.At(r, c) = tg.At(0, c) * xh + tb.At(0, c);
    }
  }
  bool rg = nodes_[x.idx].requires_grad || nodes_[gain.idx].requires_grad ||
            nodes_[bias.idx].requires_grad;
  int xi = x.idx, gi = gain.idx, bi = bias.idx;
  return {Emit(std::move(out), rg,
               [xi, gi, bi, xhat = std::move(xhat), inv_std = std::move(inv_std)](Tape& t,
                                                                                  int self) {
    const Tensor& g = t.nodes_[self].grad;
    const Tensor& tg = t.nodes_[gi].value;
    const int d = g.cols;
    if (t.nodes_[xi].requires_grad) {
      Tensor& px = t.GradRef(xi);
      for (int r = 0; r < g.rows; ++r) {
        double sum_dxhat = 0.0, sum_dxhat_xhat = 0.0;
        for (int c = 0; c < d; ++c) {
          double dxh = g.At(r, c) * tg.At(0, c);
          sum_dxhat += dxh;
          sum_dxhat_xhat += dxh * xhat.At(r, c);
        }
        for (int c = 0; c < d; ++c) {
          double dxh = g.At(r, c) * tg.At(0, c);
          px.At(r, c) += inv_std[r] *
                         (dxh - sum_dxhat / d - xhat.At(r, c) * sum_dxhat_xhat / d);
        }
      }
    }
    if (t.nodes_[gi].requires_grad) {
      Tensor& pgain = t.GradRef(gi);
      for (int r = 0; r < g.rows; ++r) {
        for (int c = 0; c < d; ++c) pgain.At(0, c) += g.At(r, c) * xhat.At(r, c);
      }
    }
    if (t.nodes_[bi].requires_grad) {
      Tensor& pbias = t.GradRef(bi);
      for (int r = 0; r < g.rows; ++r) {
        for (int c = 0; c < d; ++c) pbias.At(0, c) += g.At(r, c);
      }
    }
  })};
}

Var Tape::MaskedSoftmax(Var scores, const AttentionMask* mask, int64_t* fully_masked_rows) {
  const Tensor& ts = nodes_[scores.idx].value;
  if (mask != nullptr) {
    CheckShape(mask->rows == ts.rows && mask->cols == ts.cols, "masked_softmax");
  }
  Tensor out(ts.rows, ts.cols);
  for (int r = 0; r < ts.rows; ++r) {
    double maxv = -1e300;
    bool any = false;
    for (int c = 0; c < ts.cols; ++c) {
      if (mask == nullptr || mask->Ok(r, c)) {
        any = true;
        maxv = std::max(maxv, ts.At(r, c));
      }
    }
    if (!any) {
      if (fully_masked_rows != nullptr) ++(*fully_masked_rows);
      continue;  // zero row
    }
    double sum = 0.0;
    for (int c = 0; c < ts.cols; ++c) {
      if (mask == nullptr || mask->Ok(r, c)) {
        double e = std::exp(ts.At(r, c) - maxv);
        out.At(r, c) = e;
        sum += e;
      }
    }
    for (int c = 0; c < ts.cols; ++c) out.At(r, c) /= sum;
  }
  int si = scores.idx;
  return {Emit(std::move(out), nodes_[scores.idx].requires_grad, [si](Tape& t, int self) {
    if (!t.nodes_[si].requires_grad) return;
    const Tensor& g = t.nodes_[self].grad;
    const Tensor& p = t.nodes_[self].value;
    Tensor& ps = t.GradRef(si);
    for (int r = 0; r < g.rows; ++r) {
      double dot = 0.0;
      for (int c = 0; c < g.cols; ++c) dot += g.At(r, c) * p.At(r, c);
      for (int c = 0; c < g.cols; ++c) {
        ps.At(r, c) += p.At(r, c) * (g.At(r, c) - dot);
      }
    }
  })};
}

Var Tape::Dropout(Var a, double rate, Rng& rng) {
  if (rate <= 0.0) return a;
  if (rate >= 1.0) throw DataError("dropout rate must be < 1");
  const Tensor& ta = nodes_[a.idx].value;
  Tensor mask(ta.rows, ta.cols);
  const double keep_scale = 1.0 / (1.0 - rate);
  for (double& m : mask.data) m = rng.NextDouble() >= rate ? keep_scale : 0.0;
  Tensor out = ta;
  for (size_t i = 0; i < out.data.size(); ++i) out.data[i] *= mask.data[i];
  int ai = a.idx;
  return {Emit(std::move(out), nodes_[a.idx].requires_grad,
               [ai, mask = std::move(mask)](Tape& t, int self) {
    if (!t.nodes_[ai].requires_grad) return;
    const Tensor& g = t.nodes_[self].grad;
    Tensor& pg = t.GradRef(ai);
    for (size_t i = 0; i < g.data.size(); ++i) pg.data[i] += g.data[i] * mask.data[i];
  })};
}

Var Tape::LabelSmoothedCeSum(Var logits, const std::vector<int>& targets, int pad_id,
                             double label_eps, int64_t* num_positions) {
  const Tensor& tz = nodes_[logits.idx].value;
  CheckShape(static_cast<int>(targets.size()) == tz.rows, "label_smoothed_ce targets");
  const int v = tz.cols;
  int64_t n = 0;
  Tensor probs(tz.rows, v);
  double total = 0.0;
  for (int r = 0; r < tz.rows; ++r) {
    int tgt = targets[r];
    if (tgt == pad_id) continue;
    if (tgt < 0 || tgt >= v) {
      throw DataError("target id out of range: " + std::to_string(tgt));
    }
    ++n;
    double maxv = tz.At(r, 0);
    for (int c = 1; c < v; ++c) maxv = std::max(maxv, tz.At(r, c));
    double sum = 0.0, zsum = 0.0;
    for (int c = 0; c < v; ++c) {
      sum += std::exp(tz.At(r, c) - maxv);
      zsum += tz.At(r, c);
    }
    double lse = maxv + std::log(sum);
    for (int c = 0; c < v; ++c) probs.At(r, c) = std::exp(tz.At(r, c) - lse);
    total += lse - ((1.0 - label_eps) * tz.At(r, tgt) + label_eps / v * zsum);
  }
  if (n == 0) throw DataError("empty target");
  if (num_positions != nullptr) *num_positions = n;
  Tensor out(1, 1);
  out.At(0, 0) = total;
  int zi = logits.idx;
  std::vector<int> tgt_copy = targets;
  return {Emit(std::move(out), nodes_[logits.idx].requires_grad,
               [zi, tgt_copy, pad_id, label_eps, probs = std::move(probs)](Tape& t, int self) {
    if (!t.nodes_[zi].requires_grad) return;
    const double g = t.nodes_[self].grad.At(0, 0);
    Tensor& pz = t.GradRef(zi);
    const int v = pz.cols;
    for (int r = 0; r < pz.rows; ++r) {
      int tgt = tgt_copy[r];
      if (tgt == pad_id) continue;
      for (int c = 0; c < v; ++c) {
        double q = label_eps / v + (c == tgt ? 1.0 - label_eps : 0.0);
        pz.At(r, c) += g * (probs.At(r, c) - q);
      }
    }
  })};
}

void Tape::Backward(Var loss, double seed) {
  if (!loss.Valid() || loss.idx >= static_cast<int>(nodes_.size())) {
    throw DataError("backward: invalid loss node");
  }
  Node& ln = nodes_[loss.idx];
  if (ln.value.rows != 1 || ln.value.cols != 1) {
    throw DataError("backward: loss must be a 1x1 tensor");
  }
  for (int i = 0; i <= loss.idx; ++i) {
    Node& n = nodes_[i];
    if (n.requires_grad && n.grad.data.empty()) {
      n.grad = Tensor::Zeros(n.value.rows, n.value.cols);
    }
  }
  if (!ln.requires_grad) return;  // nothing reachable requires gradients
  ln.grad.At(0, 0) += seed;
  for (int i = loss.idx; i >= 0; --i) {
    Node& n = nodes_[i];
    if (n.requires_grad && n.backprop) n.backprop(*this, i);
  }
}

}  // namespace nn
}  // namespace mlasr
