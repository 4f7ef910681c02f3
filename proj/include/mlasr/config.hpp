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

#ifndef MLASR_CONFIG_HPP_
#define MLASR_CONFIG_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mlasr/corpus.hpp"
#include "mlasr/frontend.hpp"
#include "mlasr/model.hpp"
#include "mlasr/scoring.hpp"
#include "mlasr/training.hpp"

namespace mlasr {
namespace config {

struct DecodeSettings {
  int beam = 8;
  int max_len_cap = 200;
  bool length_norm = false;
};

struct Paths {
  std::string work_dir = "work";
  std::string train_manifest;
  std::string test_manifest;
};

// One declarative experiment: corpus -> features -> BPE -> vocab ->
// train -> average -> decode -> score, per scheme.
struct ExperimentConfig {
  uint64_t seed = 1;
  int alpha = 60;
  std::vector<std::string> schemes = {"plain", "b", "e", "b2"};
  Paths paths;
  std::optional<corpus::ToySpec> toy;  // generated when manifests are absent
  frontend::FrontendConfig frontend;
  model::ModelConfig model;  // vocab_size/feat_dim are derived at run time
  train::TrainConfig train;
  DecodeSettings decode;
  std::map<std::string, score::Unit> score_units = score::DefaultUnits();

  static ExperimentConfig FromJson(const nlohmann::json& j);
  // overrides are dotted "key.path=value" pairs applied before parsing.
  static ExperimentConfig FromFile(const std::string& path,
                                   const std::vector<std::string>& overrides = {});
  nlohmann::json ToJson() const;
  // FNV-1a of the canonical serialization.
  uint64_t Hash() const;
};

// "a.b.c=value" applied onto a JSON tree; value parsed as JSON when
// possible, kept as a string otherwise.
void ApplyOverride(nlohmann::json& j, const std::string& assignment);

}  // namespace config
}  // namespace mlasr

#endif  // MLASR_CONFIG_HPP_
