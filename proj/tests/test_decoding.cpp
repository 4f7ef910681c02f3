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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "mlasr/checkpoint.hpp"
#include "mlasr/common.hpp"
#include "mlasr/decoding.hpp"
#include "mlasr/lexicon.hpp"
#include "mlasr/model.hpp"
#include "mlasr/rng.hpp"
#include "mlasr/scoring.hpp"
#include "mlasr/training.hpp"

using namespace mlasr;
using lex::Scheme;
using lex::SymbolVocab;

// ---------------------------------------------------------------------------
// Edit distance and scoring
// ---------------------------------------------------------------------------

#include "support/oracles.hpp"


TEST_CASE("edit distance: one substitution in three words gives WER 1/3") {
  std::vector<std::string> ref = {"by", "any", "means"};
  std::vector<std::string> hyp = {"by", "any", "beans"};
  score::EditCounts c = score::EditDistance(ref, hyp);
  CHECK(c.sub == 1);
  CHECK(c.ins == 0);
  CHECK(c.del == 0);
  CHECK(c.ref_len == 3);
  CHECK(static_cast<double>(c.Errors()) / c.ref_len == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("edit distance fixtures") {
  score::EditCounts all_del = score::EditDistance({"a", "b", "c"}, {});
  CHECK(all_del.del == 3);
  CHECK(all_del.sub == 0);
  CHECK(all_del.ins == 0);

  score::EditCounts all_ins = score::EditDistance({}, {"a", "b"});
  CHECK(all_ins.ins == 2);
  CHECK(all_ins.ref_len == 0);

  score::EditCounts equal = score::EditDistance({"x", "y"}, {"x", "y"});
  CHECK(equal.Errors() == 0);

  // Substitutions are preferred over insert+delete pairs at equal cost.
  score::EditCounts pref = score::EditDistance({"a", "b"}, {"c", "d"});
  CHECK(pref.sub == 2);
  CHECK(pref.ins == 0);
  CHECK(pref.del == 0);
}

TEST_CASE("edit distance matches the recursive oracle on random pairs") {
  Rng rng(2026);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<std::string> ref = oracle::RandTokens(rng, 12, 3);
    std::vector<std::string> hyp = oracle::RandTokens(rng, 12, 3);
    score::EditCounts got = score::EditDistance(ref, hyp);
    score::EditCounts want = oracle::EditDistance(ref, hyp);
    REQUIRE(got.sub == want.sub);
    REQUIRE(got.ins == want.ins);
    REQUIRE(got.del == want.del);
    REQUIRE(got.ref_len == want.ref_len);
  }
}

TEST_CASE("swapping ref and hyp swaps insertions and deletions") {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> a = oracle::RandTokens(rng, 10, 3);
    std::vector<std::string> b = oracle::RandTokens(rng, 10, 3);
    score::EditCounts ab = score::EditDistance(a, b);
    score::EditCounts ba = score::EditDistance(b, a);
    CHECK(ab.sub == ba.sub);
    CHECK(ab.ins == ba.del);
    CHECK(ab.del == ba.ins);
  }
}

TEST_CASE("tokenization: words split on whitespace, chars on scalars") {
  CHECK(score::Tokenize("by any  means", score::Unit::kWord) ==
        std::vector<std::string>{"by", "any", "means"});
  CHECK(score::Tokenize(" ab c\t", score::Unit::kChar) ==
        std::vector<std::string>{"a", "b", "c"});
  // Multi-byte scalars stay whole under the character unit.
  CHECK(score::Tokenize("日本 語", score::Unit::kChar) ==
        std::vector<std::string>{"日", "本", "語"});
  CHECK(score::ParseUnit("word") == score::Unit::kWord);
  CHECK(score::ParseUnit("char") == score::Unit::kChar);
  CHECK_THROWS_AS(score::ParseUnit("syllable"), DataError);
}

TEST_CASE("corpus scoring: per-language units, macro and micro averages") {
  std::vector<score::Utterance> utts = {
      {"u1", "EN", "by any means", "by any beans"},  // word: 1 err / 3
      {"u2", "EN", "hello there", "hello there"},    // word: 0 err / 2
      {"u3", "MA", "日本語", "日本后"},              // char: 1 err / 3
  };
  std::map<std::string, score::Unit> units = score::DefaultUnits();
  score::ScoreReport r = score::ScoreCorpus(utts, units);
  REQUIRE(r.per_language.count("EN") == 1);
  REQUIRE(r.per_language.count("MA") == 1);
  CHECK(r.per_language.at("EN").unit == score::Unit::kWord);
  CHECK(r.per_language.at("MA").unit == score::Unit::kChar);
  CHECK(r.per_language.at("EN").error_rate == doctest::Approx(1.0 / 5.0));
  CHECK(r.per_language.at("MA").error_rate == doctest::Approx(1.0 / 3.0));
  CHECK(r.macro_average == doctest::Approx(0.5 * (0.2 + 1.0 / 3.0)));
  CHECK(r.micro_average == doctest::Approx(2.0 / 8.0));

  CHECK_THROWS_AS(score::ScoreCorpus({}, units), DataError);
  std::vector<score::Utterance> empty_refs = {{"u1", "EN", "", "hi"}};
  CHECK_THROWS_AS(score::ScoreCorpus(empty_refs, units), DataError);
}

// ---------------------------------------------------------------------------
// Beam search over a real (tiny, overfit) model
// ---------------------------------------------------------------------------

namespace {

struct BeamFixture {
  model::ModelParams params;
  SymbolVocab vocab;
  std::vector<train::TrainItem> items;
  Scheme scheme;
};

frontend::FeatureMatrix PatternFeats(int frames, int dim, int pattern) {
  frontend::FeatureMatrix f;
  f.frames = frames;
  f.dim = dim;
  f.frame_shift_ms = 30.0f;
  f.data.resize(static_cast<size_t>(frames) * dim);
  Rng rng(9000 + pattern);
  for (double& x : f.data) x = rng.Uniform(-1, 1);
  return f;
}

// Two "languages" with two-unit transcripts each; the model overfits the
// feature-pattern -> token-sequence mapping in a few hundred steps.
const BeamFixture& Fixture() {
  static BeamFixture* fx = [] {
    std::vector<std::string> units = {"ka", "ki", "ku", "mo", "mu", "me"};
    SymbolVocab vocab = SymbolVocab::Build(units, {"AA", "BB"}, Scheme::kB2);

    std::vector<train::TrainItem> items;
    auto add = [&](int pattern, const std::string& lang,
                   const bpe::SubwordSeq& text) {
      lex::TaggedSequence tag = lex::TagSequence(text, lang, Scheme::kB2, vocab);
      train::TrainItem item;
      item.utt_id = "fx" + std::to_string(pattern);
      item.feats = PatternFeats(6, 10, pattern);
      item.prefix.assign(tag.ids.begin(), tag.ids.end() - 1);
      item.target.assign(tag.ids.begin() + 1, tag.ids.end());
      items.push_back(std::move(item));
    };
    add(0, "AA", {"ka", "ki"});
    add(1, "AA", {"ku", "ka"});
    add(2, "BB", {"mo", "mu"});
    add(3, "BB", {"me", "mo"});

    model::ModelConfig mc;
    mc.n_layers = 1;
    mc.d_model = 16;
    mc.n_heads = 2;
    mc.d_k = 8;
    mc.d_v = 8;
    mc.d_ff = 32;
    mc.vocab_size = vocab.Size();
    mc.feat_dim = 10;

    train::TrainConfig tc;
    tc.epsilon_ls = 0.0;
    tc.warmup_steps = 40;
    tc.epochs = 150;  // 1 batch/epoch at this size
    tc.checkpoint_every = 1000000;
    tc.average_last = 1;
    tc.frame_budget = 1000;
    tc.seed = 4;

    train::TrainOptions opts;
    opts.model_cfg = mc;
    opts.train_cfg = tc;
    opts.vocab_hash = vocab.Hash();
    opts.out_dir = "/tmp/mlasr_beam_fixture";
    train::TrainResult r = train::Train(items, opts);
    REQUIRE(r.final_loss < 0.2);  // the fixture must actually overfit
    ckpt::LoadedCheckpoint loaded = ckpt::LoadCheckpoint(r.checkpoint_paths.back());
    return new BeamFixture{std::move(loaded.params), std::move(vocab),
                           std::move(items), Scheme::kB2};
  }();
  return *fx;
}

// Greedy reference: argmax token by token, ties to the smaller id.
std::vector<int> GreedyDecode(const model::ModelParams& p, const SymbolVocab& vocab,
                              const frontend::FeatureMatrix& feats, int start,
                              int max_len) {
  nn::Tensor memory = model::EncodeFeatures(p, feats, nullptr);
  std::vector<int> ids = {start};
  for (int step = 0; step < max_len; ++step) {
    nn::Tensor logits = model::NextTokenLogits(p, memory, ids, nullptr);
    int best = 0;
    for (int v = 1; v < logits.cols; ++v) {
      if (logits.At(0, v) > logits.At(0, best)) best = v;
    }
    ids.push_back(best);
    if (best == SymbolVocab::kEosId) break;
  }
  return ids;
}

}  // namespace

TEST_CASE("beam width 1 equals greedy decoding") {
  const BeamFixture& fx = Fixture();
  decode::DecodeConfig dc;
  dc.beam = 1;
  for (const train::TrainItem& item : fx.items) {
    std::string lang = item.utt_id == "fx0" || item.utt_id == "fx1" ? "AA" : "BB";
    std::vector<decode::Hypothesis> hyps =
        decode::BeamSearch(fx.params, fx.vocab, fx.scheme, item.feats, dc, lang);
    REQUIRE(hyps.size() == 1);
    std::vector<int> greedy =
        GreedyDecode(fx.params, fx.vocab, item.feats, fx.vocab.LangSymbolId(lang),
                     2 + item.feats.frames);
    CHECK(hyps[0].ids == greedy);
  }
}

TEST_CASE("the overfit model reproduces its training transcripts") {
  const BeamFixture& fx = Fixture();
  decode::DecodeConfig dc;
  dc.beam = 4;
  int exact = 0;
  for (const train::TrainItem& item : fx.items) {
    std::string lang = item.utt_id == "fx0" || item.utt_id == "fx1" ? "AA" : "BB";
    std::vector<decode::Hypothesis> hyps =
        decode::BeamSearch(fx.params, fx.vocab, fx.scheme, item.feats, dc, lang);
    std::vector<int> want = item.prefix;
    want.push_back(SymbolVocab::kEosId);  // full tagged sequence
    if (hyps[0].ids == want) ++exact;
  }
  CHECK(exact == 4);
}

TEST_CASE("wider beams never lower the best complete score") {
  const BeamFixture& fx = Fixture();
  for (const train::TrainItem& item : fx.items) {
    double prev = -1e30;
    for (int beam : {1, 2, 4, 8}) {
      decode::DecodeConfig dc;
      dc.beam = beam;
      std::vector<decode::Hypothesis> hyps =
          decode::BeamSearch(fx.params, fx.vocab, fx.scheme, item.feats, dc, "AA");
      CHECK(hyps[0].log_prob >= prev - 1e-12);
      prev = hyps[0].log_prob;
      CHECK(static_cast<int>(hyps.size()) <= beam);
      // Returned list is sorted best-first.
      for (size_t i = 1; i < hyps.size(); ++i) {
        CHECK(hyps[i - 1].log_prob >= hyps[i].log_prob);
      }
    }
  }
}

TEST_CASE("forced language controls the start token and the prediction") {
  const BeamFixture& fx = Fixture();
  decode::DecodeConfig dc;
  dc.beam = 2;
  std::vector<decode::Hypothesis> hyps = decode::BeamSearch(
      fx.params, fx.vocab, fx.scheme, fx.items[0].feats, dc, "BB");
  CHECK(hyps[0].ids[0] == fx.vocab.LangSymbolId("BB"));
  CHECK(hyps[0].predicted_language == "BB");

  // B2 requires a forced language; other schemes refuse one.
  CHECK_THROWS_AS(decode::BeamSearch(fx.params, fx.vocab, Scheme::kB2,
                                     fx.items[0].feats, dc, std::nullopt),
                  DataError);
  CHECK_THROWS_AS(decode::BeamSearch(fx.params, fx.vocab, Scheme::kPlain,
                                     fx.items[0].feats, dc, "AA"),
                  DataError);
  CHECK_THROWS_AS(decode::BeamSearch(fx.params, fx.vocab, fx.scheme,
                                     fx.items[0].feats, dc, "ZZ"),
                  DataError);
}

TEST_CASE("hypothesis length respects min(2 + frames, cap)") {
  const BeamFixture& fx = Fixture();
  decode::DecodeConfig dc;
  dc.beam = 2;
  dc.max_len_cap = 3;
  std::vector<decode::Hypothesis> hyps = decode::BeamSearch(
      fx.params, fx.vocab, fx.scheme, fx.items[0].feats, dc, "AA");
  for (const decode::Hypothesis& h : hyps) {
    CHECK(h.ids.size() <= 3);
  }
}

TEST_CASE("hypothesis text detokenizes sub-words") {
  const BeamFixture& fx = Fixture();
  decode::Hypothesis h;
  h.ids = {fx.vocab.LangSymbolId("AA"), fx.vocab.IdOrUnk("ka"), fx.vocab.IdOrUnk("ki"),
           SymbolVocab::kEosId};
  CHECK(h.Text(fx.vocab) == "ka ki");
}
