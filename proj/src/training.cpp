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

#include "mlasr/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

#include "mlasr/checkpoint.hpp"
#include "mlasr/common.hpp"

namespace mlasr {
namespace train {

void TrainConfig::Validate() const {
  if (epsilon_ls < 0.0 || epsilon_ls >= 1.0) throw DataError("epsilon_ls must be in [0,1)");
  if (warmup_steps < 1) throw DataError("warmup_steps must be >= 1");
  if (!(clip_norm > 0.0)) throw DataError("clip_norm must be positive");
  if (frame_budget < 1) throw DataError("frame_budget must be >= 1");
  if (epochs < 1) throw DataError("epochs must be >= 1");
  if (checkpoint_every < 1) throw DataError("checkpoint_every must be >= 1");
  if (average_last < 1) throw DataError("average_last must be >= 1");
}

double LrSchedule(int64_t step, int d_model, int64_t warmup) {
  if (step < 1) throw DataError("lr schedule: step must be >= 1");
  if (d_model < 1 || warmup < 1) throw DataError("lr schedule: bad d_model/warmup");
  double s = static_cast<double>(step);
  double w = static_cast<double>(warmup);
  return std::pow(static_cast<double>(d_model), -0.5) *
         std::min(std::pow(s, -0.5), s * std::pow(w, -1.5));
}

double LabelSmoothedCe(const nn::Tensor& logits, const std::vector<int>& targets,
                       int pad_id, double eps) {
  nn::Tape tape;
  nn::Var z = tape.Leaf(logits, false);
  int64_t n = 0;
  nn::Var sum = tape.LabelSmoothedCeSum(z, targets, pad_id, eps, &n);
  return tape.Value(sum).At(0, 0) / static_cast<double>(n);
}

double GlobalNorm(const GradientSet& g) {
  double ss = 0.0;
  for (const auto& [name, t] : g) {
    for (double x : t.data) ss += x * x;
  }
  return std::sqrt(ss);
}

double ClipGradients(GradientSet& g, double max_norm) {
  if (!(max_norm > 0.0)) throw DataError("clip: max_norm must be positive");
  for (const auto& [name, t] : g) {
    if (!t.AllFinite()) throw NumericError("non-finite gradient in " + name);
  }
  double norm = GlobalNorm(g);
  if (norm > max_norm) {
    double scale = max_norm / norm;
    for (auto& [name, t] : g) {
      for (double& x : t.data) x *= scale;
    }
  }
  return norm;
}

AdamState AdamState::Init(const model::ModelParams& p) {
  AdamState s;
  for (const auto& [name, t] : p.tensors) {
    s.m[name] = nn::Tensor::Zeros(t.rows, t.cols);
    s.v[name] = nn::Tensor::Zeros(t.rows, t.cols);
  }
  return s;
}

void AdamStep(model::ModelParams& params, const GradientSet& grads, AdamState& state,
              double lr, double beta1, double beta2, double eps) {
  ++state.t;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.t));
  for (auto& [name, p] : params.tensors) {
    auto git = grads.find(name);
    if (git == grads.end()) throw DataError("adam: missing gradient for " + name);
    const nn::Tensor& g = git->second;
    if (!g.SameShape(p)) throw DataError("adam: gradient shape mismatch for " + name);
    nn::Tensor& m = state.m.at(name);
    nn::Tensor& v = state.v.at(name);
    for (size_t i = 0; i < p.data.size(); ++i) {
      m.data[i] = beta1 * m.data[i] + (1.0 - beta1) * g.data[i];
      v.data[i] = beta2 * v.data[i] + (1.0 - beta2) * g.data[i] * g.data[i];
      double mhat = m.data[i] / bc1;
      double vhat = v.data[i] / bc2;
      p.data[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
  }
}

model::ModelParams AverageCheckpoints(const std::vector<std::string>& paths,
                                      uint64_t* vocab_hash_out) {
  if (paths.empty()) throw DataError("average: no checkpoints given");
  std::vector<std::string> sorted = paths;
  std::sort(sorted.begin(), sorted.end());
  ckpt::LoadedCheckpoint first = ckpt::LoadCheckpoint(sorted[0]);
  model::ModelParams avg = first.params;
  for (size_t i = 1; i < sorted.size(); ++i) {
    ckpt::LoadedCheckpoint c = ckpt::LoadCheckpoint(sorted[i]);
    if (c.vocab_hash != first.vocab_hash) {
      throw DataError("average: vocab hash mismatch in " + sorted[i]);
    }
    if (c.params.tensors.size() != avg.tensors.size()) {
      throw DataError("average: tensor set mismatch in " + sorted[i]);
    }
    for (auto& [name, t] : avg.tensors) {
      const nn::Tensor& other = c.params.Get(name);
      if (!other.SameShape(t)) throw DataError("average: shape mismatch for " + name);
      for (size_t k = 0; k < t.data.size(); ++k) t.data[k] += other.data[k];
    }
  }
  const double inv = 1.0 / static_cast<double>(sorted.size());
  for (auto& [name, t] : avg.tensors) {
    for (double& x : t.data) x *= inv;
  }
  if (vocab_hash_out != nullptr) *vocab_hash_out = first.vocab_hash;
  return avg;
}

model::ModelParams TransferInit(const model::ModelParams& pretrained,
                                int new_vocab_size, uint64_t seed) {
  model::ModelConfig cfg = pretrained.cfg;
  cfg.vocab_size = new_vocab_size;
  cfg.Validate();
  if (!pretrained.cfg.CompatibleForTransfer(cfg)) {
    throw DataError("transfer: model geometry mismatch");
  }
  model::ModelParams out = pretrained;
  out.cfg = cfg;
  Rng root(seed);
  const double emb_bound = 1.0 / std::sqrt(static_cast<double>(cfg.d_model));
  {
    Rng r = root.Fork(Fnv1a64("embed.e"));
    out.tensors["embed.e"] =
        nn::Tensor::UniformInit(cfg.vocab_size, cfg.d_model, emb_bound, r);
  }
  {
    Rng r = root.Fork(Fnv1a64("out.w"));
    out.tensors["out.w"] =
        nn::Tensor::UniformInit(cfg.d_model, cfg.vocab_size, emb_bound, r);
  }
  out.tensors["out.b"] = nn::Tensor::Zeros(1, cfg.vocab_size);
  return out;
}

std::vector<TrainItem> PrepareItems(const corpus::Manifest& manifest,
                                    const featio::Archive& archive,
                                    const bpe::MergeTable& merges,
                                    const lex::SymbolVocab& vocab, lex::Scheme scheme) {
  std::vector<TrainItem> items;
  items.reserve(manifest.records.size());
  for (const corpus::Record& r : manifest.records) {
    if (r.transcript.empty()) {
      throw DataError("training record without transcript: " + r.utt_id);
    }
    std::string feat_key = r.utt_id;
    if (!r.feature_ref.empty()) feat_key = featio::ParseFeatureRef(r.feature_ref).second;
    TrainItem item;
    item.utt_id = r.utt_id;
    item.feats = archive.Get(feat_key);
    bpe::SubwordSeq units = bpe::EncodeText(r.transcript, merges);
    lex::TaggedSequence seq = lex::TagSequence(units, r.language, scheme, vocab);
    if (seq.ids.size() < 2) throw DataError("degenerate target for " + r.utt_id);
    item.prefix.assign(seq.ids.begin(), seq.ids.end() - 1);
    item.target.assign(seq.ids.begin() + 1, seq.ids.end());
    items.push_back(std::move(item));
  }
  return items;
}

namespace {

// Frame-budget batches over length-sorted items; every batch holds at
// least one utterance.
std::vector<std::vector<int>> MakeBatches(const std::vector<TrainItem>& items,
                                          int64_t frame_budget) {
  std::vector<int> order(items.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return items[a].feats.frames < items[b].feats.frames;
  });
  std::vector<std::vector<int>> batches;
  std::vector<int> cur;
  int64_t cur_frames = 0;
  for (int idx : order) {
    int64_t f = items[idx].feats.frames;
    if (!cur.empty() && cur_frames + f > frame_budget) {
      batches.push_back(std::move(cur));
      cur.clear();
      cur_frames = 0;
    }
    cur.push_back(idx);
    cur_frames += f;
  }
  if (!cur.empty()) batches.push_back(std::move(cur));
  return batches;
}

}  // namespace

TrainResult Train(const std::vector<TrainItem>& items, const TrainOptions& opts) {
  if (items.empty()) throw DataError("train: no items");
  opts.model_cfg.Validate();
  opts.train_cfg.Validate();
  const TrainConfig& tc = opts.train_cfg;

  model::ModelParams params =
      opts.init != nullptr ? *opts.init : model::ModelParams::Init(opts.model_cfg, tc.seed);
  if (opts.init != nullptr && params.cfg.vocab_size != opts.model_cfg.vocab_size) {
    throw DataError("train: init checkpoint vocab size mismatch");
  }
  AdamState adam = AdamState::Init(params);
  Rng rng(tc.seed ^ 0x9e3779b97f4a7c15ULL);

  if (!opts.out_dir.empty()) std::filesystem::create_directories(opts.out_dir);
  std::ofstream log;
  if (!opts.log_path.empty()) {
    log.open(opts.log_path, std::ios::trunc);
    if (!log) throw DataError("cannot open training log: " + opts.log_path);
  }

  std::vector<std::vector<int>> batches = MakeBatches(items, tc.frame_budget);
  TrainResult result;
  int64_t step = 0;
  const auto t0 = std::chrono::steady_clock::now();

  for (int epoch = 0; epoch < tc.epochs; ++epoch) {
    // Seeded shuffle of batch order; batch membership stays fixed.
    std::vector<int> batch_order(batches.size());
    std::iota(batch_order.begin(), batch_order.end(), 0);
    for (size_t i = batch_order.size(); i > 1; --i) {
      size_t j = rng.NextBelow(i);
      std::swap(batch_order[i - 1], batch_order[j]);
    }

    for (int bi : batch_order) {
      ++step;
      nn::Tape tape;
      model::BoundParams bp = model::BindParams(tape, params, true);
      model::ForwardDiag diag;
      Rng* drop_rng = opts.model_cfg.dropout > 0.0 ? &rng : nullptr;

      std::vector<nn::Var> sums;
      int64_t total_positions = 0;
      for (int idx : batches[bi]) {
        const TrainItem& it = items[idx];
        nn::Var memory = model::EncoderForward(tape, bp, model::ToTensor(it.feats),
                                               opts.model_cfg, nullptr, &diag, drop_rng);
        nn::Var logits = model::DecoderForward(tape, bp, memory, it.prefix, opts.model_cfg,
                                               nullptr, lex::SymbolVocab::kPadId, &diag,
                                               drop_rng);
        int64_t n = 0;
        sums.push_back(tape.LabelSmoothedCeSum(logits, it.target,
                                               lex::SymbolVocab::kPadId, tc.epsilon_ls,
                                               &n));
        total_positions += n;
      }
      nn::Var total = sums[0];
      for (size_t k = 1; k < sums.size(); ++k) total = tape.Add(total, sums[k]);
      nn::Var loss = tape.Scale(total, 1.0 / static_cast<double>(total_positions));

      double loss_value = tape.Value(loss).At(0, 0);
      if (!std::isfinite(loss_value)) {
        throw NumericError("training diverged (non-finite loss) at step " +
                           std::to_string(step));
      }
      tape.Backward(loss);

      GradientSet grads;
      for (const auto& [name, var] : bp.vars) grads[name] = tape.Grad(var);
      double grad_norm = ClipGradients(grads, tc.clip_norm);
      double lr = LrSchedule(step, opts.model_cfg.d_model, tc.warmup_steps);
      AdamStep(params, grads, adam, lr, tc.beta1, tc.beta2, tc.adam_eps);

      result.loss_curve.push_back(loss_value);
      result.final_loss = loss_value;
      if (log.is_open()) {
        nlohmann::json j;
        j["step"] = step;
        j["lr"] = lr;
        j["loss"] = loss_value;
        j["grad_norm"] = grad_norm;
        j["wall_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - t0)
                           .count();
        log << j.dump() << '\n';
      }

      if (!opts.out_dir.empty() && step % tc.checkpoint_every == 0) {
        std::string path = ckpt::CheckpointName(opts.out_dir, step);
        ckpt::SaveCheckpoint(path, params, opts.vocab_hash);
        result.checkpoint_paths.push_back(path);
      }
    }
  }
  if (!opts.out_dir.empty() && (step % tc.checkpoint_every != 0 || step == 0 ||
                                result.checkpoint_paths.empty())) {
    std::string path = ckpt::CheckpointName(opts.out_dir, step);
    ckpt::SaveCheckpoint(path, params, opts.vocab_hash);
    result.checkpoint_paths.push_back(path);
  }
  result.steps = step;
  return result;
}

}  // namespace train
}  // namespace mlasr
