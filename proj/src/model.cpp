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

#include "mlasr/model.hpp"

#include <cmath>

#include "mlasr/common.hpp"

namespace mlasr {
namespace model {

void ModelConfig::Validate() const {
  if (n_layers < 0) throw DataError("model config: n_layers must be >= 0");
  if (d_model < 1 || n_heads < 1 || d_k < 1 || d_v < 1 || d_ff < 1) {
    throw DataError("model config: all dims must be >= 1");
  }
  if (n_heads * d_k != d_model) {
    throw DataError("model config: h*d_k must equal d_model");
  }
  if (vocab_size < 5) throw DataError("model config: vocab_size too small");
  if (feat_dim < 1) throw DataError("model config: feat_dim must be >= 1");
  if (dropout < 0.0 || dropout >= 1.0) {
    throw DataError("model config: dropout must be in [0,1)");
  }
}

bool ModelConfig::CompatibleForTransfer(const ModelConfig& o) const {
  return n_layers == o.n_layers && d_model == o.d_model && n_heads == o.n_heads &&
         d_k == o.d_k && d_v == o.d_v && d_ff == o.d_ff && feat_dim == o.feat_dim;
}

namespace {

// (name, rows, cols, kind) for every tensor of a config.
enum class ParamKind { kWeight, kBias, kLnGain, kEmbed };

struct ParamSpec {
  std::string name;
  int rows, cols;
  ParamKind kind;
};

std::vector<ParamSpec> ParamSpecs(const ModelConfig& c) {
  std::vector<ParamSpec> s;
  auto ln = [&s](const std::string& p) {
    s.push_back({p + ".g", 1, 0, ParamKind::kLnGain});
    s.push_back({p + ".b", 1, 0, ParamKind::kBias});
  };
  auto mha = [&s, &c](const std::string& p) {
    s.push_back({p + ".wq", c.d_model, c.n_heads * c.d_k, ParamKind::kWeight});
    s.push_back({p + ".wk", c.d_model, c.n_heads * c.d_k, ParamKind::kWeight});
    s.push_back({p + ".wv", c.d_model, c.n_heads * c.d_v, ParamKind::kWeight});
    s.push_back({p + ".wo", c.n_heads * c.d_v, c.d_model, ParamKind::kWeight});
  };
  auto ffn = [&s, &c](const std::string& p) {
    s.push_back({p + ".w1", c.d_model, c.d_ff, ParamKind::kWeight});
    s.push_back({p + ".b1", 1, c.d_ff, ParamKind::kBias});
    s.push_back({p + ".w2", c.d_ff, c.d_model, ParamKind::kWeight});
    s.push_back({p + ".b2", 1, c.d_model, ParamKind::kBias});
  };
  s.push_back({"prenet.w", c.feat_dim, c.d_model, ParamKind::kWeight});
  s.push_back({"prenet.b", 1, c.d_model, ParamKind::kBias});
  ln("prenet.ln");
  for (int l = 0; l < c.n_layers; ++l) {
    std::string e = "enc." + std::to_string(l);
    mha(e + ".self");
    ln(e + ".ln1");
    ffn(e + ".ffn");
    ln(e + ".ln2");
  }
  for (int l = 0; l < c.n_layers; ++l) {
    std::string d = "dec." + std::to_string(l);
    mha(d + ".self");
    ln(d + ".ln1");
    mha(d + ".cross");
    ln(d + ".ln2");
    ffn(d + ".ffn");
    ln(d + ".ln3");
  }
  s.push_back({"embed.e", c.vocab_size, c.d_model, ParamKind::kEmbed});
  s.push_back({"out.w", c.d_model, c.vocab_size, ParamKind::kWeight});
  s.push_back({"out.b", 1, c.vocab_size, ParamKind::kBias});
  // Layer-norm vectors span d_model; fill in their width.
  for (ParamSpec& ps : s) {
    if (ps.cols == 0) ps.cols = c.d_model;
  }
  return s;
}

}  // namespace

ModelParams ModelParams::Init(const ModelConfig& cfg, uint64_t seed) {
  cfg.Validate();
  ModelParams p;
  p.cfg = cfg;
  Rng root(seed);
  for (const ParamSpec& s : ParamSpecs(cfg)) {
    Rng tr = root.Fork(Fnv1a64(s.name));
    switch (s.kind) {
      case ParamKind::kWeight: {
        double bound = 1.0 / std::sqrt(static_cast<double>(s.rows));
        p.tensors[s.name] = nn::Tensor::UniformInit(s.rows, s.cols, bound, tr);
        break;
      }
      case ParamKind::kEmbed: {
        double bound = 1.0 / std::sqrt(static_cast<double>(s.cols));
        p.tensors[s.name] = nn::Tensor::UniformInit(s.rows, s.cols, bound, tr);
        break;
      }
      case ParamKind::kBias:
        p.tensors[s.name] = nn::Tensor::Zeros(s.rows, s.cols);
        break;
      case ParamKind::kLnGain:
        p.tensors[s.name] = nn::Tensor::Full(s.rows, s.cols, 1.0);
        break;
    }
  }
  return p;
}

const nn::Tensor& ModelParams::Get(const std::string& name) const {
  auto it = tensors.find(name);
  if (it == tensors.end()) throw DataError("unknown parameter: " + name);
  return it->second;
}

nn::Tensor& ModelParams::GetMutable(const std::string& name) {
  auto it = tensors.find(name);
  if (it == tensors.end()) throw DataError("unknown parameter: " + name);
  return it->second;
}

bool ModelParams::AllFinite() const {
  for (const auto& [name, t] : tensors) {
    if (!t.AllFinite()) return false;
  }
  return true;
}

nn::Var BoundParams::Get(const std::string& name) const {
  auto it = vars.find(name);
  if (it == vars.end()) throw DataError("parameter not bound: " + name);
  return it->second;
}

BoundParams BindParams(nn::Tape& tape, const ModelParams& p, bool requires_grad) {
  BoundParams bp;
  for (const auto& [name, t] : p.tensors) {
    bp.vars[name] = tape.Leaf(t, requires_grad);
  }
  return bp;
}

nn::Tensor ToTensor(const frontend::FeatureMatrix& f) {
  nn::Tensor t(f.frames, f.dim);
  t.data = f.data;
  return t;
}

double PositionalEncoding(int pos, int i, int d_model) {
  if (i < 0 || i >= d_model) throw DataError("positional encoding index out of range");
  int k2 = i - (i & 1);  // exponent uses the even partner
  double denom = std::pow(10000.0, static_cast<double>(k2) / d_model);
  double angle = pos / denom;
  return (i & 1) ? std::cos(angle) : std::sin(angle);
}

nn::Tensor PeMatrix(int len, int d_model) {
  nn::Tensor pe(len, d_model);
  for (int pos = 0; pos < len; ++pos) {
    for (int i = 0; i < d_model; ++i) pe.At(pos, i) = PositionalEncoding(pos, i, d_model);
  }
  return pe;
}

nn::Var Prenet(nn::Tape& tape, const BoundParams& bp, const nn::Tensor& feats,
               const ModelConfig& cfg) {
  if (feats.cols != cfg.feat_dim) {
    throw DataError("prenet: feature dim " + std::to_string(feats.cols) +
                    " != configured feat_dim " + std::to_string(cfg.feat_dim));
  }
  nn::Var x = tape.Leaf(feats, false);
  nn::Var h = tape.AddRowwise(tape.Matmul(x, bp.Get("prenet.w")), bp.Get("prenet.b"));
  return tape.LayerNorm(h, bp.Get("prenet.ln.g"), bp.Get("prenet.ln.b"));
}

nn::Var MultiHeadAttention(nn::Tape& tape, const BoundParams& bp,
                           const std::string& prefix, nn::Var q_in, nn::Var k_in,
                           nn::Var v_in, const nn::AttentionMask* mask,
                           const ModelConfig& cfg, ForwardDiag* diag) {
  nn::Var q = tape.Matmul(q_in, bp.Get(prefix + ".wq"));
  nn::Var k = tape.Matmul(k_in, bp.Get(prefix + ".wk"));
  nn::Var v = tape.Matmul(v_in, bp.Get(prefix + ".wv"));
  const double inv_sqrt_dk = 1.0 / std::sqrt(static_cast<double>(cfg.d_k));
  std::vector<nn::Var> heads;
  heads.reserve(cfg.n_heads);
  int64_t* counter = diag != nullptr ? &diag->fully_masked_rows : nullptr;
  for (int h = 0; h < cfg.n_heads; ++h) {
    nn::Var qh = tape.SliceCols(q, h * cfg.d_k, cfg.d_k);
    nn::Var kh = tape.SliceCols(k, h * cfg.d_k, cfg.d_k);
    nn::Var vh = tape.SliceCols(v, h * cfg.d_v, cfg.d_v);
    nn::Var scores = tape.Scale(tape.Matmul(qh, tape.Transpose(kh)), inv_sqrt_dk);
    nn::Var attn = tape.MaskedSoftmax(scores, mask, counter);
    heads.push_back(tape.Matmul(attn, vh));
  }
  return tape.Matmul(tape.ConcatCols(heads), bp.Get(prefix + ".wo"));
}

namespace {

nn::Var MaybeDropout(nn::Tape& tape, nn::Var x, const ModelConfig& cfg, Rng* rng) {
  if (rng == nullptr || cfg.dropout <= 0.0) return x;
  return tape.Dropout(x, cfg.dropout, *rng);
}

nn::Var FeedForward(nn::Tape& tape, const BoundParams& bp, const std::string& prefix,
                    nn::Var x) {
  nn::Var h = tape.Relu(
      tape.AddRowwise(tape.Matmul(x, bp.Get(prefix + ".w1")), bp.Get(prefix + ".b1")));
  return tape.AddRowwise(tape.Matmul(h, bp.Get(prefix + ".w2")), bp.Get(prefix + ".b2"));
}

// Post-norm residual: x -> layernorm(x + sublayer).
nn::Var AddNorm(nn::Tape& tape, const BoundParams& bp, const std::string& ln_prefix,
                nn::Var x, nn::Var sub) {
  return tape.LayerNorm(tape.Add(x, sub), bp.Get(ln_prefix + ".g"),
                        bp.Get(ln_prefix + ".b"));
}

}  // namespace

nn::Var EncoderForward(nn::Tape& tape, const BoundParams& bp, const nn::Tensor& feats,
                       const ModelConfig& cfg, const std::vector<uint8_t>* frame_ok,
                       ForwardDiag* diag, Rng* rng) {
  if (frame_ok != nullptr && static_cast<int>(frame_ok->size()) != feats.rows) {
    throw DataError("encoder: frame_ok size mismatch");
  }
  nn::Var x = Prenet(tape, bp, feats, cfg);
  nn::Var pe = tape.Leaf(PeMatrix(feats.rows, cfg.d_model), false);
  x = MaybeDropout(tape, tape.Add(x, pe), cfg, rng);
  nn::AttentionMask mask;
  const nn::AttentionMask* mask_ptr = nullptr;
  if (frame_ok != nullptr) {
    mask = nn::AttentionMask::KeyUsable(feats.rows, *frame_ok);
    mask_ptr = &mask;
  }
  for (int l = 0; l < cfg.n_layers; ++l) {
    std::string p = "enc." + std::to_string(l);
    nn::Var attn = MultiHeadAttention(tape, bp, p + ".self", x, x, x, mask_ptr, cfg, diag);
    x = AddNorm(tape, bp, p + ".ln1", x, MaybeDropout(tape, attn, cfg, rng));
    nn::Var ff = FeedForward(tape, bp, p + ".ffn", x);
    x = AddNorm(tape, bp, p + ".ln2", x, MaybeDropout(tape, ff, cfg, rng));
  }
  return x;
}

nn::Var DecoderForward(nn::Tape& tape, const BoundParams& bp, nn::Var memory,
                       const std::vector<int>& prefix_ids, const ModelConfig& cfg,
                       const std::vector<uint8_t>* memory_ok, int pad_id,
                       ForwardDiag* diag, Rng* rng) {
  const int len = static_cast<int>(prefix_ids.size());
  if (len == 0) throw DataError("decoder: empty prefix");
  bool in_pad_tail = false;
  for (int t = 0; t < len; ++t) {
    if (prefix_ids[t] == pad_id) {
      in_pad_tail = true;
    } else if (in_pad_tail) {
      throw DataError("decoder: PAD in non-suffix position");
    }
  }
  const int t_mem = tape.Value(memory).rows;
  if (memory_ok != nullptr && static_cast<int>(memory_ok->size()) != t_mem) {
    throw DataError("decoder: memory_ok size mismatch");
  }

  nn::Var emb = tape.GatherRows(bp.Get("embed.e"), prefix_ids);
  nn::Var x = tape.Scale(emb, std::sqrt(static_cast<double>(cfg.d_model)));
  nn::Var pe = tape.Leaf(PeMatrix(len, cfg.d_model), false);
  x = MaybeDropout(tape, tape.Add(x, pe), cfg, rng);

  // Causal self-attention; PAD keys are never attendable.
  nn::AttentionMask self_mask = nn::AttentionMask::Causal(len);
  for (int j = 0; j < len; ++j) {
    if (prefix_ids[j] == pad_id) {
      for (int i = 0; i < len; ++i) self_mask.Set(i, j, false);
    }
  }
  nn::AttentionMask cross_mask;
  const nn::AttentionMask* cross_ptr = nullptr;
  if (memory_ok != nullptr) {
    cross_mask = nn::AttentionMask::KeyUsable(len, *memory_ok);
    cross_ptr = &cross_mask;
  }

  for (int l = 0; l < cfg.n_layers; ++l) {
    std::string p = "dec." + std::to_string(l);
    nn::Var self =
        MultiHeadAttention(tape, bp, p + ".self", x, x, x, &self_mask, cfg, diag);
    x = AddNorm(tape, bp, p + ".ln1", x, MaybeDropout(tape, self, cfg, rng));
    nn::Var cross = MultiHeadAttention(tape, bp, p + ".cross", x, memory, memory,
                                       cross_ptr, cfg, diag);
    x = AddNorm(tape, bp, p + ".ln2", x, MaybeDropout(tape, cross, cfg, rng));
    nn::Var ff = FeedForward(tape, bp, p + ".ffn", x);
    x = AddNorm(tape, bp, p + ".ln3", x, MaybeDropout(tape, ff, cfg, rng));
  }
  return tape.AddRowwise(tape.Matmul(x, bp.Get("out.w")), bp.Get("out.b"));
}

nn::Tensor EncodeFeatures(const ModelParams& p, const frontend::FeatureMatrix& f,
                          ForwardDiag* diag) {
  nn::Tape tape;
  BoundParams bp = BindParams(tape, p, false);
  nn::Var mem = EncoderForward(tape, bp, ToTensor(f), p.cfg, nullptr, diag);
  return tape.Value(mem);
}

nn::Tensor NextTokenLogits(const ModelParams& p, const nn::Tensor& memory,
                           const std::vector<int>& prefix_ids, ForwardDiag* diag) {
  nn::Tape tape;
  BoundParams bp = BindParams(tape, p, false);
  nn::Var mem = tape.Leaf(memory, false);
  nn::Var logits = DecoderForward(tape, bp, mem, prefix_ids, p.cfg, nullptr,
                                  /*pad_id=*/0, diag);
  const nn::Tensor& all = tape.Value(logits);
  nn::Tensor last(1, all.cols);
  for (int c = 0; c < all.cols; ++c) last.At(0, c) = all.At(all.rows - 1, c);
  return last;
}

}  // namespace model
}  // namespace mlasr
