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

#ifndef MLASR_PIPELINE_HPP_
#define MLASR_PIPELINE_HPP_

#include <string>
#include <vector>

#include "mlasr/config.hpp"
#include "mlasr/corpus.hpp"
#include "mlasr/scoring.hpp"

namespace mlasr {
namespace pipeline {

// Log-mel (+ speed-perturbed copies when `augment`), per-speaker CMVN,
// stacking; writes the archive and returns a manifest whose records carry
// feature_ref entries. Perturbed copies get "sp<factor>-" utterance and
// speaker prefixes.
corpus::Manifest FeaturizeManifest(const corpus::Manifest& in,
                                   const frontend::FrontendConfig& fc,
                                   const std::string& archive_path, bool augment);

struct SchemeResult {
  std::string scheme;
  score::ScoreReport report;
  double lang_id_accuracy = -1.0;  // < 0 when the scheme emits no language symbols
  int vocab_size = 0;
  std::string model_path;
  std::string hyps_path;
};

struct PipelineResult {
  std::vector<SchemeResult> schemes;
  std::string report_md;
  std::string report_csv;
  uint64_t config_hash = 0;
};

// featurize -> bpe-learn -> vocab -> train -> average -> decode -> score,
// once per configured scheme. Any stage failure is rethrown with the
// stage name prefixed.
PipelineResult RunPipeline(const config::ExperimentConfig& cfg);

struct SweepRow {
  int alpha = 0;
  int vocab_size = 0;
  double error_rate = 0.0;  // macro average of the first configured scheme
};

// One pipeline run per alpha (first configured scheme only); writes
// sweep.md / sweep.csv under the work dir.
std::vector<SweepRow> SweepAlpha(const config::ExperimentConfig& cfg,
                                 const std::vector<int>& alphas);

}  // namespace pipeline
}  // namespace mlasr

#endif  // MLASR_PIPELINE_HPP_
