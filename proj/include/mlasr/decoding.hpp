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

#ifndef MLASR_DECODING_HPP_
#define MLASR_DECODING_HPP_

#include <optional>
#include <string>
#include <vector>

#include "mlasr/frontend.hpp"
#include "mlasr/lexicon.hpp"
#include "mlasr/model.hpp"

namespace mlasr {
namespace decode {

struct Hypothesis {
  std::vector<int> ids;  // includes the start token
  double log_prob = 0.0;
  bool finished = false;  // closed at EOS
  std::optional<std::string> predicted_language;
  std::string Text(const lex::SymbolVocab& vocab) const;  // detokenized sub-words
};

struct DecodeConfig {
  int beam = 8;
  int max_len_cap = 200;      // max_len = min(2 + frames, cap)
  bool length_norm = false;   // divide scores by length when ranking
};

// Start token is <S_Lang> under B2 (forced_language required there),
// <S> otherwise. Returns up to `beam` hypotheses, best first.
std::vector<Hypothesis> BeamSearch(const model::ModelParams& params,
                                   const lex::SymbolVocab& vocab, lex::Scheme scheme,
                                   const frontend::FeatureMatrix& feats,
                                   const DecodeConfig& cfg,
                                   const std::optional<std::string>& forced_language,
                                   model::ForwardDiag* diag = nullptr);

}  // namespace decode
}  // namespace mlasr

#endif  // MLASR_DECODING_HPP_
