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

#ifndef MLASR_MODEL_HPP_
#define MLASR_MODEL_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mlasr/frontend.hpp"
#include "mlasr/tensor.hpp"

namespace mlasr {
namespace model {

struct ModelConfig {
  int n_layers = 2;
  int d_model = 64;
  int n_heads = 4;
  int d_k = 16;
  int d_v = 16;
  int d_ff = 256;  // 4 * d_model by convention
  int vocab_size = 0;
  int feat_dim = 0;
  double dropout = 0.0;

  void Validate() const;
  // Everything but vocab_size must match for transfer init.
  bool CompatibleForTransfer(const ModelConfig& o) const;
};

// Named tensors. Naming scheme:
//   prenet.{w,b}; prenet.ln.{g,b}
//   enc.<L>.self.{wq,wk,wv,wo}; enc.<L>.ln1.{g,b}
//   enc.<L>.ffn.{w1,b1,w2,b2};  enc.<L>.ln2.{g,b}
//   dec.<L>.self.*; dec.<L>.ln1.*; dec.<L>.cross.*; dec.<L>.ln2.*
//   dec.<L>.ffn.*;  dec.<L>.ln3.*
//   embed.e; out.w; out.b
struct ModelParams {
  ModelConfig cfg;
  std::map<std::string, nn::Tensor> tensors;

  // uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) weights, zero biases,
  // layer-norm gain 1 / bias 0. Name-keyed RNG forks make the draw
  // independent of initialization order.
  static ModelParams Init(const ModelConfig& cfg, uint64_t seed);

  const nn::Tensor& Get(const std::string& name) const;
  nn::Tensor& GetMutable(const std::string& name);
  bool AllFinite() const;
};

// Counters surfaced by forward passes.
struct ForwardDiag {
  int64_t fully_masked_rows = 0;
};

// Parameters mounted on a tape for one differentiable graph.
struct BoundParams {
  std::map<std::string, nn::Var> vars;
  nn::Var Get(const std::string& name) const;
};

BoundParams BindParams(nn::Tape& tape, const ModelParams& p, bool requires_grad);

nn::Tensor ToTensor(const frontend::FeatureMatrix& f);

double PositionalEncoding(int pos, int i, int d_model);
nn::Tensor PeMatrix(int len, int d_model);

// layernorm(x W + b) per frame. Positions are added by the encoder.
nn::Var Prenet(nn::Tape& tape, const BoundParams& bp, const nn::Tensor& feats,
               const ModelConfig& cfg);

// Per head softmax(Q Kᵀ / sqrt(d_k)) V over attendable keys, heads
// concatenated, then W_o. `prefix` selects the projection tensors,
// e.g. "enc.0.self" or "dec.1.cross".
nn::Var MultiHeadAttention(nn::Tape& tape, const BoundParams& bp,
                           const std::string& prefix, nn::Var q_in, nn::Var k_in,
                           nn::Var v_in, const nn::AttentionMask* mask,
                           const ModelConfig& cfg, ForwardDiag* diag);

// Prenet + positions, then n_layers of post-norm (self-MHA, FFN).
// frame_ok flags usable frames (nullptr = all usable); pass `rng` to
// enable dropout at rate cfg.dropout.
nn::Var EncoderForward(nn::Tape& tape, const BoundParams& bp, const nn::Tensor& feats,
                       const ModelConfig& cfg, const std::vector<uint8_t>* frame_ok,
                       ForwardDiag* diag, Rng* rng = nullptr);

// Embedding * sqrt(d_model) + positions, then n_layers of post-norm
// (causal self-MHA, cross-MHA, FFN), then the vocab projection.
// PAD ids are legal only as a trailing run.
nn::Var DecoderForward(nn::Tape& tape, const BoundParams& bp, nn::Var memory,
                       const std::vector<int>& prefix_ids, const ModelConfig& cfg,
                       const std::vector<uint8_t>* memory_ok, int pad_id,
                       ForwardDiag* diag, Rng* rng = nullptr);

// Gradient-free conveniences for decoding.
nn::Tensor EncodeFeatures(const ModelParams& p, const frontend::FeatureMatrix& f,
                          ForwardDiag* diag);
nn::Tensor NextTokenLogits(const ModelParams& p, const nn::Tensor& memory,
                           const std::vector<int>& prefix_ids, ForwardDiag* diag);

}  // namespace model
}  // namespace mlasr

#endif  // MLASR_MODEL_HPP_
