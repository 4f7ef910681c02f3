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

#include "mlasr/config.hpp"

#include <set>

#include "mlasr/common.hpp"
#include "mlasr/lexicon.hpp"

namespace mlasr {
namespace config {

using json = nlohmann::json;

namespace {

void CheckKeys(const json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw DataError("config: '" + where + "' must be an object");
  for (const auto& [key, value] : j.items()) {
    if (known.count(key) == 0) {
      throw DataError("config: unknown key '" + where + (where.empty() ? "" : ".") + key + "'");
    }
  }
}

template <typename T>
void Fetch(const json& j, const char* key, T& into) {
  if (!j.contains(key)) return;
  try {
    into = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw DataError(std::string("config: bad value for '") + key + "': " + e.what());
  }
}

corpus::ToySpec ToyFromJson(const json& j, uint64_t seed) {
  CheckKeys(j, {"languages", "sample_rate", "min_words", "max_words", "min_syms",
                "max_syms", "tone_ms", "gap_ms", "noise", "speakers_per_language",
                "seed"},
            "toy");
  corpus::ToySpec spec;
  spec.seed = seed;
  Fetch(j, "sample_rate", spec.sample_rate);
  Fetch(j, "min_words", spec.min_words);
  Fetch(j, "max_words", spec.max_words);
  Fetch(j, "min_syms", spec.min_syms);
  Fetch(j, "max_syms", spec.max_syms);
  Fetch(j, "tone_ms", spec.tone_ms);
  Fetch(j, "gap_ms", spec.gap_ms);
  Fetch(j, "noise", spec.noise);
  Fetch(j, "speakers_per_language", spec.speakers_per_language);
  Fetch(j, "seed", spec.seed);
  if (!j.contains("languages")) throw DataError("config: toy.languages required");
  for (const json& lj : j.at("languages")) {
    CheckKeys(lj, {"code", "symbols", "num_words", "num_train", "num_test"},
              "toy.languages[]");
    corpus::ToyLanguage lang;
    Fetch(lj, "code", lang.code);
    Fetch(lj, "symbols", lang.symbols);
    Fetch(lj, "num_words", lang.num_words);
    Fetch(lj, "num_train", lang.num_train);
    Fetch(lj, "num_test", lang.num_test);
    if (lang.code.empty()) throw DataError("config: toy language without code");
    spec.languages.push_back(std::move(lang));
  }
  return spec;
}

json ToyToJson(const corpus::ToySpec& spec) {
  json j;
  j["sample_rate"] = spec.sample_rate;
  j["min_words"] = spec.min_words;
  j["max_words"] = spec.max_words;
  j["min_syms"] = spec.min_syms;
  j["max_syms"] = spec.max_syms;
  j["tone_ms"] = spec.tone_ms;
  j["gap_ms"] = spec.gap_ms;
  j["noise"] = spec.noise;
  j["speakers_per_language"] = spec.speakers_per_language;
  j["seed"] = spec.seed;
  j["languages"] = json::array();
  for (const corpus::ToyLanguage& lang : spec.languages) {
    json lj;
    lj["code"] = lang.code;
    lj["symbols"] = lang.symbols;
    lj["num_words"] = lang.num_words;
    lj["num_train"] = lang.num_train;
    lj["num_test"] = lang.num_test;
    j["languages"].push_back(lj);
  }
  return j;
}

}  // namespace

ExperimentConfig ExperimentConfig::FromJson(const json& j) {
  CheckKeys(j, {"seed", "alpha", "schemes", "paths", "toy", "frontend", "model", "train",
                "decode", "score_units"},
            "");
  ExperimentConfig c;
  Fetch(j, "seed", c.seed);
  Fetch(j, "alpha", c.alpha);
  if (c.alpha < 1) throw DataError("config: alpha must be >= 1");
  Fetch(j, "schemes", c.schemes);
  if (c.schemes.empty()) throw DataError("config: schemes must be non-empty");
  for (const std::string& s : c.schemes) lex::ParseScheme(s);  // validates

  if (j.contains("paths")) {
    const json& p = j.at("paths");
    CheckKeys(p, {"work_dir", "train_manifest", "test_manifest"}, "paths");
    Fetch(p, "work_dir", c.paths.work_dir);
    Fetch(p, "train_manifest", c.paths.train_manifest);
    Fetch(p, "test_manifest", c.paths.test_manifest);
  }
  if (j.contains("toy")) c.toy = ToyFromJson(j.at("toy"), c.seed);

  if (j.contains("frontend")) {
    const json& f = j.at("frontend");
    CheckKeys(f, {"n_mels", "window_ms", "shift_ms", "left_stack", "downsample",
                  "perturb", "dither", "fmin", "fmax"},
              "frontend");
    Fetch(f, "n_mels", c.frontend.n_mels);
    Fetch(f, "window_ms", c.frontend.window_ms);
    Fetch(f, "shift_ms", c.frontend.shift_ms);
    Fetch(f, "left_stack", c.frontend.left_stack);
    Fetch(f, "downsample", c.frontend.downsample);
    Fetch(f, "perturb", c.frontend.perturb_factors);
    Fetch(f, "dither", c.frontend.dither);
    Fetch(f, "fmin", c.frontend.fmin);
    Fetch(f, "fmax", c.frontend.fmax);
  }
  if (j.contains("model")) {
    const json& m = j.at("model");
    CheckKeys(m, {"n_layers", "d_model", "n_heads", "d_k", "d_v", "d_ff", "dropout"},
              "model");
    Fetch(m, "n_layers", c.model.n_layers);
    Fetch(m, "d_model", c.model.d_model);
    Fetch(m, "n_heads", c.model.n_heads);
    Fetch(m, "d_k", c.model.d_k);
    Fetch(m, "d_v", c.model.d_v);
    Fetch(m, "d_ff", c.model.d_ff);
    Fetch(m, "dropout", c.model.dropout);
  }
  if (j.contains("train")) {
    const json& t = j.at("train");
    CheckKeys(t, {"epsilon_ls", "warmup_steps", "beta1", "beta2", "adam_eps",
                  "clip_norm", "frame_budget", "epochs", "checkpoint_every",
                  "average_last"},
              "train");
    Fetch(t, "epsilon_ls", c.train.epsilon_ls);
    Fetch(t, "warmup_steps", c.train.warmup_steps);
    Fetch(t, "beta1", c.train.beta1);
    Fetch(t, "beta2", c.train.beta2);
    Fetch(t, "adam_eps", c.train.adam_eps);
    Fetch(t, "clip_norm", c.train.clip_norm);
    Fetch(t, "frame_budget", c.train.frame_budget);
    Fetch(t, "epochs", c.train.epochs);
    Fetch(t, "checkpoint_every", c.train.checkpoint_every);
    Fetch(t, "average_last", c.train.average_last);
  }
  c.train.seed = c.seed;
  if (j.contains("decode")) {
    const json& d = j.at("decode");
    CheckKeys(d, {"beam", "max_len_cap", "length_norm"}, "decode");
    Fetch(d, "beam", c.decode.beam);
    Fetch(d, "max_len_cap", c.decode.max_len_cap);
    Fetch(d, "length_norm", c.decode.length_norm);
  }
  if (j.contains("score_units")) {
    c.score_units.clear();
    for (const auto& [lang, unit] : j.at("score_units").items()) {
      c.score_units[lang] = score::ParseUnit(unit.get<std::string>());
    }
  }
  return c;
}

ExperimentConfig ExperimentConfig::FromFile(const std::string& path,
                                            const std::vector<std::string>& overrides) {
  json j;
  try {
    j = json::parse(ReadFileOrThrow(path));
  } catch (const json::exception& e) {
    throw DataError("config " + path + ": " + e.what());
  }
  for (const std::string& o : overrides) ApplyOverride(j, o);
  return FromJson(j);
}

json ExperimentConfig::ToJson() const {
  json j;
  j["seed"] = seed;
  j["alpha"] = alpha;
  j["schemes"] = schemes;
  j["paths"] = {{"work_dir", paths.work_dir},
                {"train_manifest", paths.train_manifest},
                {"test_manifest", paths.test_manifest}};
  if (toy.has_value()) j["toy"] = ToyToJson(*toy);
  j["frontend"] = {{"n_mels", frontend.n_mels},
                   {"window_ms", frontend.window_ms},
                   {"shift_ms", frontend.shift_ms},
                   {"left_stack", frontend.left_stack},
                   {"downsample", frontend.downsample},
                   {"perturb", frontend.perturb_factors},
                   {"dither", frontend.dither},
                   {"fmin", frontend.fmin},
                   {"fmax", frontend.fmax}};
  j["model"] = {{"n_layers", model.n_layers}, {"d_model", model.d_model},
                {"n_heads", model.n_heads},   {"d_k", model.d_k},
                {"d_v", model.d_v},           {"d_ff", model.d_ff},
                {"dropout", model.dropout}};
  j["train"] = {{"epsilon_ls", train.epsilon_ls},
                {"warmup_steps", train.warmup_steps},
                {"beta1", train.beta1},
                {"beta2", train.beta2},
                {"adam_eps", train.adam_eps},
                {"clip_norm", train.clip_norm},
                {"frame_budget", train.frame_budget},
                {"epochs", train.epochs},
                {"checkpoint_every", train.checkpoint_every},
                {"average_last", train.average_last}};
  j["decode"] = {{"beam", decode.beam},
                 {"max_len_cap", decode.max_len_cap},
                 {"length_norm", decode.length_norm}};
  json units = json::object();
  for (const auto& [lang, unit] : score_units) units[lang] = score::UnitName(unit);
  j["score_units"] = units;
  return j;
}

uint64_t ExperimentConfig::Hash() const { return Fnv1a64(ToJson().dump()); }

void ApplyOverride(json& j, const std::string& assignment) {
  size_t eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw DataError("override must look like key.path=value: " + assignment);
  }
  std::string path = assignment.substr(0, eq);
  std::string value = assignment.substr(eq + 1);
  json parsed;
  try {
    parsed = json::parse(value);
  } catch (const json::exception&) {
    parsed = value;  // plain string
  }
  json* node = &j;
  std::vector<std::string> keys = SplitChar(path, '.');
  for (size_t i = 0; i + 1 < keys.size(); ++i) {
    if (keys[i].empty()) throw DataError("override has an empty key segment: " + assignment);
    node = &(*node)[keys[i]];
    if (!node->is_object() && !node->is_null()) {
      throw DataError("override path crosses a non-object: " + assignment);
    }
  }
  if (keys.back().empty()) throw DataError("override has an empty key segment: " + assignment);
  (*node)[keys.back()] = parsed;
}

}  // namespace config
}  // namespace mlasr
