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

#include "mlasr/decoding.hpp"

#include <algorithm>
#include <cmath>

#include "mlasr/bpe.hpp"
#include "mlasr/common.hpp"

namespace mlasr {
namespace decode {

std::string Hypothesis::Text(const lex::SymbolVocab& vocab) const {
  lex::StrippedSequence s = lex::StripTags(ids, vocab.GetScheme(), vocab);
  if (s.units.empty()) return "";
  return bpe::DecodeUnits(s.units);
}

namespace {

struct Beam {
  std::vector<int> ids;
  double log_prob = 0.0;
};

double RankScore(double log_prob, size_t len, bool length_norm) {
  return length_norm ? log_prob / static_cast<double>(len) : log_prob;
}

}  // namespace

std::vector<Hypothesis> BeamSearch(const model::ModelParams& params,
                                   const lex::SymbolVocab& vocab, lex::Scheme scheme,
                                   const frontend::FeatureMatrix& feats,
                                   const DecodeConfig& cfg,
                                   const std::optional<std::string>& forced_language,
                                   model::ForwardDiag* diag) {
  if (cfg.beam < 1) throw DataError("beam must be >= 1");
  if (params.cfg.vocab_size != vocab.Size()) {
    throw DataError("decode: model vocab size != vocabulary size");
  }
  int start_id;
  if (scheme == lex::Scheme::kB2) {
    if (!forced_language.has_value()) {
      throw DataError("scheme b2 requires a forced language");
    }
    start_id = vocab.LangSymbolId(*forced_language);
  } else {
    if (forced_language.has_value()) {
      throw DataError("forced language is only meaningful under scheme b2");
    }
    start_id = lex::SymbolVocab::kBosId;
  }

  nn::Tensor memory = model::EncodeFeatures(params, feats, diag);
  const int max_len =
      std::min(2 + feats.frames, cfg.max_len_cap);  // start token + emissions

  std::vector<Beam> live{{{start_id}, 0.0}};
  std::vector<Beam> finished;
  const int expand = 2 * cfg.beam;

  while (!live.empty() && static_cast<int>(live[0].ids.size()) < max_len) {
    // One tape per step: parameters bound once, every live hypothesis
    // extended on it.
    nn::Tape tape;
    model::BoundParams bp = model::BindParams(tape, params, false);
    nn::Var mem = tape.Leaf(memory, false);

    std::vector<Beam> candidates;
    candidates.reserve(live.size() * static_cast<size_t>(expand));
    for (const Beam& b : live) {
      nn::Var logits_var = model::DecoderForward(tape, bp, mem, b.ids, params.cfg,
                                                 nullptr, lex::SymbolVocab::kPadId, diag);
      const nn::Tensor& logits = tape.Value(logits_var);
      const int last = logits.rows - 1;
      const int v = logits.cols;
      double maxv = logits.At(last, 0);
      for (int c = 1; c < v; ++c) maxv = std::max(maxv, logits.At(last, c));
      double sum = 0.0;
      for (int c = 0; c < v; ++c) sum += std::exp(logits.At(last, c) - maxv);
      const double lse = maxv + std::log(sum);

      std::vector<int> idx(v);
      for (int c = 0; c < v; ++c) idx[c] = c;
      int take = std::min(expand, v);
      std::partial_sort(idx.begin(), idx.begin() + take, idx.end(), [&](int a, int c) {
        double za = logits.At(last, a), zc = logits.At(last, c);
        if (za != zc) return za > zc;
        return a < c;  // deterministic ties
      });
      for (int k = 0; k < take; ++k) {
        Beam nb = b;
        nb.ids.push_back(idx[k]);
        nb.log_prob += logits.At(last, idx[k]) - lse;
        candidates.push_back(std::move(nb));
      }
    }

    std::stable_sort(candidates.begin(), candidates.end(), [](const Beam& a, const Beam& b) {
      return a.log_prob > b.log_prob;
    });

    live.clear();
    for (Beam& c : candidates) {
      if (c.ids.back() == lex::SymbolVocab::kEosId) {
        finished.push_back(std::move(c));
      } else if (static_cast<int>(live.size()) < cfg.beam) {
        live.push_back(std::move(c));
      }
    }

    // Appending tokens can only lower a log-prob, so once the best finished
    // hypothesis outscores every live one the search is settled.
    if (!finished.empty() && !live.empty()) {
      double best_fin = finished[0].log_prob;
      for (const Beam& f : finished) best_fin = std::max(best_fin, f.log_prob);
      double best_live = live[0].log_prob;
      for (const Beam& l : live) best_live = std::max(best_live, l.log_prob);
      if (!cfg.length_norm && best_fin >= best_live) break;
    }
  }

  // Hypotheses still open at max_len compete as-is.
  std::vector<Beam> all = std::move(finished);
  for (Beam& l : live) all.push_back(std::move(l));
  if (all.empty()) throw DataError("beam search produced no hypotheses");
  std::stable_sort(all.begin(), all.end(), [&](const Beam& a, const Beam& b) {
    return RankScore(a.log_prob, a.ids.size(), cfg.length_norm) >
           RankScore(b.log_prob, b.ids.size(), cfg.length_norm);
  });

  std::vector<Hypothesis> out;
  for (size_t i = 0; i < all.size() && i < static_cast<size_t>(cfg.beam); ++i) {
    Hypothesis h;
    h.ids = std::move(all[i].ids);
    h.log_prob = all[i].log_prob;
    h.finished = h.ids.back() == lex::SymbolVocab::kEosId;
    lex::StrippedSequence s = lex::StripTags(h.ids, scheme, vocab);
    h.predicted_language = s.predicted_language;
    out.push_back(std::move(h));
  }
  return out;
}

}  // namespace decode
}  // namespace mlasr
