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

#ifndef MLASR_TRAINING_HPP_
#define MLASR_TRAINING_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mlasr/bpe.hpp"
#include "mlasr/corpus.hpp"
#include "mlasr/featio.hpp"
#include "mlasr/lexicon.hpp"
#include "mlasr/model.hpp"

namespace mlasr {
namespace train {

struct TrainConfig {
  double epsilon_ls = 0.1;
  int64_t warmup_steps = 12000;
  double beta1 = 0.9;
  double beta2 = 0.98;
  double adam_eps = 1e-9;
  double clip_norm = 5.0;
  int64_t frame_budget = 2000;  // stacked frames per batch
  int epochs = 20;
  int64_t checkpoint_every = 500;
  int average_last = 20;
  uint64_t seed = 1;

  void Validate() const;
};

// lr = d_model^-0.5 * min(step^-0.5, step * warmup^-1.5); peak at step==warmup.
double LrSchedule(int64_t step, int d_model, int64_t warmup);

// Mean label-smoothed cross entropy over non-pad positions;
// q = (1-eps)*onehot + eps/V over the full vocabulary.
double LabelSmoothedCe(const nn::Tensor& logits, const std::vector<int>& targets,
                       int pad_id, double eps);

using GradientSet = std::map<std::string, nn::Tensor>;

double GlobalNorm(const GradientSet& g);

// Scales to max_norm when the global norm exceeds it; returns the pre-clip
// norm. Non-finite gradients raise NumericError.
double ClipGradients(GradientSet& g, double max_norm);

struct AdamState {
  std::map<std::string, nn::Tensor> m;
  std::map<std::string, nn::Tensor> v;
  int64_t t = 0;

  static AdamState Init(const model::ModelParams& p);
};

// Standard bias-corrected Adam, one step over every named tensor.
void AdamStep(model::ModelParams& params, const GradientSet& grads, AdamState& state,
              double lr, double beta1, double beta2, double eps);

// Elementwise mean. Paths are sorted internally, so the result is
// permutation-invariant. Config and vocab hash must agree.
model::ModelParams AverageCheckpoints(const std::vector<std::string>& paths,
                                      uint64_t* vocab_hash_out = nullptr);

// Copies everything except out.w / out.b / embed.e, which are freshly
// initialized at new_vocab_size.
model::ModelParams TransferInit(const model::ModelParams& pretrained,
                                int new_vocab_size, uint64_t seed);

struct TrainItem {
  std::string utt_id;
  frontend::FeatureMatrix feats;
  std::vector<int> prefix;  // decoder input (target shifted right)
  std::vector<int> target;  // next-token labels
};

// Tags each transcript for the scheme and splits it into teacher-forcing
// prefix/target pairs. Features come from the archive.
std::vector<TrainItem> PrepareItems(const corpus::Manifest& manifest,
                                    const featio::Archive& archive,
                                    const bpe::MergeTable& merges,
                                    const lex::SymbolVocab& vocab, lex::Scheme scheme);

struct TrainOptions {
  model::ModelConfig model_cfg;
  TrainConfig train_cfg;
  uint64_t vocab_hash = 0;
  std::string out_dir;       // checkpoints land here
  std::string log_path;      // JSONL; empty disables logging
  const model::ModelParams* init = nullptr;  // nullptr = random init
};

struct TrainResult {
  std::vector<std::string> checkpoint_paths;
  std::vector<double> loss_curve;  // one entry per step
  double final_loss = 0.0;
  int64_t steps = 0;
};

TrainResult Train(const std::vector<TrainItem>& items, const TrainOptions& opts);

}  // namespace train
}  // namespace mlasr

#endif  // MLASR_TRAINING_HPP_
