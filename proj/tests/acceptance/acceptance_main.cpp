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
//
// Release gate. Each criterion prints exactly one PASS/FAIL line; the
// process exits nonzero if any criterion fails. Heavier scenarios print
// their measured numbers so regressions are visible in the log, not just
// in the verdict.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "../support/oracles.hpp"
#include "mlasr/bpe.hpp"
#include "mlasr/checkpoint.hpp"
#include "mlasr/common.hpp"
#include "mlasr/corpus.hpp"
#include "mlasr/decoding.hpp"
#include "mlasr/featio.hpp"
#include "mlasr/frontend.hpp"
#include "mlasr/lexicon.hpp"
#include "mlasr/model.hpp"
#include "mlasr/pipeline.hpp"
#include "mlasr/rng.hpp"
#include "mlasr/scoring.hpp"
#include "mlasr/tensor.hpp"
#include "mlasr/training.hpp"

using namespace mlasr;
using lex::Scheme;
using lex::SymbolVocab;

namespace {

// ---------------------------------------------------------------------------
// Harness
// ---------------------------------------------------------------------------

struct Failure {
  std::string message;
};

void Need(bool cond, const std::string& message) {
  if (!cond) throw Failure{message};
}

std::string Fmt(const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof(buf), fmt, args);
  va_end(args);
  return buf;
}

int g_failures = 0;

// fn returns a short detail string shown next to the verdict.
void Criterion(const std::string& name, const std::function<std::string()>& fn) {
  auto t0 = std::chrono::steady_clock::now();
  bool ok = false;
  std::string detail;
  try {
    detail = fn();
    ok = true;
  } catch (const Failure& f) {
    detail = f.message;
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!ok) ++g_failures;
  std::printf("%s — %s [%.1fs]%s%s\n", ok ? "PASS" : "FAIL", name.c_str(), secs,
              detail.empty() ? "" : " ", detail.c_str());
  std::fflush(stdout);
}

const std::string kWorkDir = "/tmp/mlasr_acceptance";

// ---------------------------------------------------------------------------
// 1. BPE learner vs brute-force oracle
// ---------------------------------------------------------------------------

std::string CheckBpeOracle() {
  auto t0 = std::chrono::steady_clock::now();
  Rng rng(20260814);
  const std::string alphabets[2] = {"abcdefghij", "abcdeαβγψω"};
  for (int trial = 0; trial < 200; ++trial) {
    bpe::WordCounts counts = oracle::RandomCounts(rng, 50, 8, alphabets[trial % 2]);
    int64_t alpha = rng.NextBelow(31);
    bpe::MergeTable table = bpe::LearnMerges(counts, alpha);
    std::vector<std::pair<std::string, std::string>> ref =
        oracle::LearnMerges(counts, alpha);
    Need(table.merges == ref,
         Fmt("merge sequence diverged from the oracle on trial %d (alpha=%lld)",
             trial, static_cast<long long>(alpha)));
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  Need(secs < 30.0, Fmt("200 corpora took %.1fs, budget is 30s", secs));
  return Fmt("(200 corpora, %.1fs)", secs);
}

// ---------------------------------------------------------------------------
// 2. Sub-word round trip
// ---------------------------------------------------------------------------

std::string CheckRoundTrip() {
  // The published segmentation of "amazing" under the merge sequence that
  // produces it.
  bpe::MergeTable fixture;
  fixture.merges = {{"a", "m"}, {"am", "a"}, {"i", "n"}, {"in", "g"}};
  fixture.num_merges = 4;
  bpe::SubwordSeq amazing = bpe::EncodeText("amazing", fixture);
  Need(amazing == bpe::SubwordSeq{"ama@@", "z@@", "ing"},
       "'amazing' did not segment as ama@@ z@@ ing");
  Need(bpe::DecodeUnits(amazing) == "amazing", "'amazing' did not decode back");

  // A learned table, then identity over random sentences from the same
  // alphabet (novel words included: identity must hold for any input).
  Rng rng(424242);
  bpe::WordCounts corpus = oracle::RandomCounts(rng, 400, 8, "abcdefg");
  bpe::MergeTable table = bpe::LearnMerges(corpus, 150);
  std::vector<std::string> lexicon;
  for (const auto& [w, c] : corpus) lexicon.push_back(w);
  for (int trial = 0; trial < 10000; ++trial) {
    int words = 1 + static_cast<int>(rng.NextBelow(12));
    std::string sentence;
    for (int w = 0; w < words; ++w) {
      if (w > 0) sentence += ' ';
      if (rng.NextBelow(4) == 0) {  // one in four words is novel
        int len = 1 + static_cast<int>(rng.NextBelow(8));
        for (int i = 0; i < len; ++i) {
          sentence += static_cast<char>('a' + rng.NextBelow(7));
        }
      } else {
        sentence += lexicon[rng.NextBelow(lexicon.size())];
      }
    }
    std::string back = bpe::DecodeUnits(bpe::EncodeText(sentence, table));
    Need(back == sentence, Fmt("round trip broke on trial %d", trial));
  }
  return "(10000 sentences + fixture)";
}

// ---------------------------------------------------------------------------
// 3. Tagging layouts and vocabulary accounting
// ---------------------------------------------------------------------------

std::string CheckSchemeLayouts() {
  bpe::SubwordSeq units = {"ama@@", "z@@", "ing"};
  std::vector<std::string> langs = {"EN", "JA", "MA", "ZH"};

  auto tokens = [](const SymbolVocab& v, const std::vector<int>& ids) {
    std::vector<std::string> out;
    for (int id : ids) out.push_back(v.TokenOf(id));
    return out;
  };
  using Row = std::vector<std::string>;
  struct Case {
    Scheme scheme;
    Row expect;
  };
  const std::vector<Case> table = {
      {Scheme::kPlain, {"<S>", "ama@@", "z@@", "ing", "<\\S>"}},
      {Scheme::kB, {"<S>", "<S_EN>", "ama@@", "z@@", "ing", "<\\S>"}},
      {Scheme::kE, {"<S>", "ama@@", "z@@", "ing", "<S_EN>", "<\\S>"}},
      {Scheme::kB2, {"<S_EN>", "ama@@", "z@@", "ing", "<\\S>"}},
  };
  for (const Case& c : table) {
    SymbolVocab v = SymbolVocab::Build(units, langs, c.scheme);
    lex::TaggedSequence t = lex::TagSequence(units, "EN", c.scheme, v);
    Need(tokens(v, t.ids) == c.expect,
         Fmt("layout mismatch for scheme %s", lex::SchemeName(c.scheme).c_str()));
  }

  // 548 sub-words + the 4 specials = 552, as an arithmetic identity on a
  // vocabulary actually holding 548 distinct units.
  std::vector<std::string> many;
  for (int i = 0; i < 548; ++i) many.push_back("u" + std::to_string(i));
  SymbolVocab big = SymbolVocab::Build(many, {"EN"}, Scheme::kPlain);
  lex::VocabAccounting acc = big.Accounting();
  Need(acc.subwords == 548, Fmt("expected 548 sub-words, got %lld",
                                static_cast<long long>(acc.subwords)));
  Need(acc.specials == 4, "expected 4 specials");
  Need(acc.total_without_lang() == 552 && big.Size() == 552,
       Fmt("548+4 should be 552, vocab says %lld",
           static_cast<long long>(big.Size())));
  return "(4 layouts, 548+4=552)";
}

// ---------------------------------------------------------------------------
// 4. Whole-model gradient check
// ---------------------------------------------------------------------------

model::ModelConfig MicroConfig() {
  model::ModelConfig cfg;
  cfg.n_layers = 1;
  cfg.d_model = 8;
  cfg.n_heads = 2;
  cfg.d_k = 4;
  cfg.d_v = 4;
  cfg.d_ff = 16;
  cfg.vocab_size = 11;
  cfg.feat_dim = 6;
  cfg.dropout = 0.0;
  return cfg;
}

std::string CheckGradients() {
  auto t0 = std::chrono::steady_clock::now();
  const model::ModelConfig cfg = MicroConfig();
  model::ModelParams params = model::ModelParams::Init(cfg, 31);

  frontend::FeatureMatrix feats(5, cfg.feat_dim);
  Rng rng(77);
  for (double& x : feats.data) x = rng.Uniform(-1, 1);
  const std::vector<int> prefix = {2, 6, 9, 4};
  const std::vector<int> target = {6, 9, 4, 3};
  const double eps_ls = 0.1;

  auto eval = [&]() {
    nn::Tape tape;
    model::BoundParams bp = model::BindParams(tape, params, false);
    nn::Var memory =
        model::EncoderForward(tape, bp, model::ToTensor(feats), cfg, nullptr, nullptr);
    nn::Var logits = model::DecoderForward(tape, bp, memory, prefix, cfg, nullptr,
                                           SymbolVocab::kPadId, nullptr);
    int64_t n = 0;
    nn::Var loss = tape.LabelSmoothedCeSum(logits, target, SymbolVocab::kPadId,
                                           eps_ls, &n);
    return tape.Value(loss).At(0, 0);
  };

  // Analytic gradients, one backward pass.
  std::map<std::string, nn::Tensor> analytic;
  {
    nn::Tape tape;
    model::BoundParams bp = model::BindParams(tape, params, true);
    nn::Var memory =
        model::EncoderForward(tape, bp, model::ToTensor(feats), cfg, nullptr, nullptr);
    nn::Var logits = model::DecoderForward(tape, bp, memory, prefix, cfg, nullptr,
                                           SymbolVocab::kPadId, nullptr);
    int64_t n = 0;
    nn::Var loss = tape.LabelSmoothedCeSum(logits, target, SymbolVocab::kPadId,
                                           eps_ls, &n);
    tape.Backward(loss);
    for (const auto& [name, var] : bp.vars) analytic[name] = tape.Grad(var);
  }

  const double h = 1e-5;
  double worst = 0.0;
  std::string worst_at;
  int64_t checked = 0;
  for (auto& [name, tensor] : params.tensors) {
    const nn::Tensor& g = analytic.at(name);
    for (size_t i = 0; i < tensor.data.size(); ++i) {
      double saved = tensor.data[i];
      tensor.data[i] = saved + h;
      double up = eval();
      tensor.data[i] = saved - h;
      double down = eval();
      tensor.data[i] = saved;
      double numeric = (up - down) / (2 * h);
      double a = g.data[i];
      double rel = std::fabs(a - numeric) / std::max({1.0, std::fabs(a), std::fabs(numeric)});
      ++checked;
      if (rel > worst) {
        worst = rel;
        worst_at = name + "[" + std::to_string(i) + "]";
      }
    }
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  Need(worst <= 1e-4,
       Fmt("max rel err %.3e at %s (budget 1e-4)", worst, worst_at.c_str()));
  Need(secs < 60.0, Fmt("gradient check took %.1fs, budget is 60s", secs));
  return Fmt("(%lld partials, max rel err %.2e, %.1fs)",
             static_cast<long long>(checked), worst, secs);
}

// ---------------------------------------------------------------------------
// 5. Decoder causality
// ---------------------------------------------------------------------------

std::string CheckCausality() {
  model::ModelConfig cfg = MicroConfig();
  cfg.n_layers = 2;
  model::ModelParams params = model::ModelParams::Init(cfg, 99);
  Rng rng(555);

  frontend::FeatureMatrix feats(6, cfg.feat_dim);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    for (double& x : feats.data) x = rng.Uniform(-1, 1);
    int len = 2 + static_cast<int>(rng.NextBelow(8));
    std::vector<int> a(len), b(len);
    for (int i = 0; i < len; ++i) a[i] = b[i] = 4 + static_cast<int>(rng.NextBelow(7));
    int t = static_cast<int>(rng.NextBelow(len - 1));  // keep positions 0..t
    for (int i = t + 1; i < len; ++i) {
      b[i] = 4 + static_cast<int>(rng.NextBelow(7));
    }

    auto logits_of = [&](const std::vector<int>& prefix) {
      nn::Tape tape;
      model::BoundParams bp = model::BindParams(tape, params, false);
      nn::Var memory =
          model::EncoderForward(tape, bp, model::ToTensor(feats), cfg, nullptr, nullptr);
      nn::Var out = model::DecoderForward(tape, bp, memory, prefix, cfg, nullptr,
                                          SymbolVocab::kPadId, nullptr);
      return tape.Value(out);
    };
    nn::Tensor la = logits_of(a);
    nn::Tensor lb = logits_of(b);
    for (int pos = 0; pos <= t; ++pos) {
      for (int v = 0; v < cfg.vocab_size; ++v) {
        worst = std::max(worst, std::fabs(la.At(pos, v) - lb.At(pos, v)));
      }
    }
  }
  Need(worst <= 1e-9, Fmt("suffix leaked into earlier logits: max diff %.3e", worst));
  return Fmt("(100 trials, max diff %.1e)", worst);
}

// ---------------------------------------------------------------------------
// 6. Learning-rate schedule
// ---------------------------------------------------------------------------

std::string CheckSchedule() {
  double lr = train::LrSchedule(12000, 1024, 12000);
  Need(std::fabs(lr - 2.853e-4) <= 1e-7,
       Fmt("lr(12000,1024,12000) = %.7e, expected 2.853e-4 +/- 1e-7", lr));

  const int64_t warmup = 12000;
  double peak = train::LrSchedule(warmup, 1024, warmup);
  for (int64_t s = 1; s < warmup; s += 97) {
    Need(train::LrSchedule(s, 1024, warmup) < peak, "pre-warmup lr reached the peak");
  }
  for (int64_t s = warmup + 1; s < 4 * warmup; s += 97) {
    Need(train::LrSchedule(s, 1024, warmup) < peak, "post-warmup lr exceeded the peak");
  }
  // Strictly rising into the peak and falling out of it.
  Need(train::LrSchedule(warmup - 1, 1024, warmup) < peak &&
           train::LrSchedule(warmup + 1, 1024, warmup) < peak,
       "peak is not exactly at the warmup step");
  return Fmt("(lr=%.4e, peak at step %lld)", lr, static_cast<long long>(warmup));
}

// ---------------------------------------------------------------------------
// 7. Checkpoint averaging
// ---------------------------------------------------------------------------

std::string CheckAveraging() {
  const std::string dir = kWorkDir + "/averaging";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const model::ModelConfig cfg = MicroConfig();

  const int K = 20;
  std::vector<std::string> paths;
  std::vector<model::ModelParams> originals;
  for (int k = 0; k < K; ++k) {
    model::ModelParams p = model::ModelParams::Init(cfg, 1000 + k);
    std::string path = ckpt::CheckpointName(dir, k + 1);
    ckpt::SaveCheckpoint(path, p, /*vocab_hash=*/42);
    paths.push_back(path);
    originals.push_back(std::move(p));
  }
  // Hand the paths over in scrambled order; averaging must not care.
  std::vector<std::string> scrambled = paths;
  Rng rng(8);
  for (size_t i = scrambled.size(); i > 1; --i) {
    std::swap(scrambled[i - 1], scrambled[rng.NextBelow(i)]);
  }
  model::ModelParams avg = train::AverageCheckpoints(scrambled);

  double worst = 0.0;
  for (const auto& [name, t] : avg.tensors) {
    for (size_t i = 0; i < t.data.size(); ++i) {
      // Checkpoints narrow to float32 on disk; recompute the same mean.
      double mean = 0.0;
      for (const model::ModelParams& p : originals) {
        mean += static_cast<double>(static_cast<float>(p.tensors.at(name).data[i]));
      }
      mean /= K;
      worst = std::max(worst, std::fabs(t.data[i] - mean));
    }
  }
  Need(worst <= 1e-7, Fmt("K=20 average off by %.3e (budget 1e-7)", worst));

  model::ModelParams one = train::AverageCheckpoints({paths[0]});
  for (const auto& [name, t] : one.tensors) {
    const nn::Tensor& o = originals[0].tensors.at(name);
    for (size_t i = 0; i < t.data.size(); ++i) {
      Need(t.data[i] == static_cast<double>(static_cast<float>(o.data[i])),
           "K=1 averaging is not the identity");
    }
  }
  return Fmt("(K=20 max err %.1e, K=1 identity)", worst);
}

// ---------------------------------------------------------------------------
// 8 & 9. Toy bilingual reproduction and transfer-init report
// ---------------------------------------------------------------------------

struct ToyFixture {
  corpus::ToyCorpus corpus;
  corpus::Manifest train_feat, test_feat;
  featio::Archive train_arch, test_arch;
  bpe::MergeTable merges;
  std::map<std::string, std::set<char>> lang_chars;
  frontend::FrontendConfig fc;
};

ToyFixture BuildToyFixture(const std::string& dir) {
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);

  corpus::ToySpec spec;
  corpus::ToyLanguage aa;
  aa.code = "AA";
  for (char c = 'a'; c <= 'h'; ++c) aa.symbols.push_back(std::string(1, c));
  corpus::ToyLanguage bb;
  bb.code = "BB";
  for (char c = 'i'; c <= 'p'; ++c) bb.symbols.push_back(std::string(1, c));
  // 24 words per language, 200 train / 40 test utterances per language.
  // Longer tones than the generator default: at a 30ms stacked-frame rate a
  // symbol spans ~3.3 frames and word gaps ~1.5, which keeps symbol order
  // and word boundaries clearly resolvable.
  spec.languages = {aa, bb};
  spec.tone_ms = 100.0;
  spec.gap_ms = 45.0;
  spec.seed = 1;

  ToyFixture fx;
  fx.corpus = corpus::GenerateToyCorpus(spec, dir + "/corpus");

  fx.fc.n_mels = 32;
  fx.fc.left_stack = 3;
  fx.fc.downsample = 3;
  fx.fc.perturb_factors = {0.9, 1.0, 1.1};
  fx.train_feat =
      pipeline::FeaturizeManifest(fx.corpus.train, fx.fc, dir + "/train.mlfa", true);
  fx.test_feat =
      pipeline::FeaturizeManifest(fx.corpus.test, fx.fc, dir + "/test.mlfa", false);
  fx.train_arch = featio::ReadArchive(dir + "/train.mlfa");
  fx.test_arch = featio::ReadArchive(dir + "/test.mlfa");

  bpe::WordCounts counts;
  for (const corpus::Record& r : fx.corpus.train.records) {
    for (const std::string& w : SplitWhitespace(r.transcript)) counts[w] += 1;
  }
  fx.merges = bpe::LearnMerges(counts, 60);

  for (const corpus::ToyLanguage& lang : spec.languages) {
    for (const std::string& s : lang.symbols) fx.lang_chars[lang.code].insert(s[0]);
  }
  return fx;
}

model::ModelConfig DeskConfig(int vocab_size, int feat_dim) {
  model::ModelConfig cfg;
  cfg.n_layers = 2;
  cfg.d_model = 64;
  cfg.n_heads = 4;
  cfg.d_k = 16;
  cfg.d_v = 16;
  cfg.d_ff = 256;
  cfg.vocab_size = vocab_size;
  cfg.feat_dim = feat_dim;
  cfg.dropout = 0.1;
  return cfg;
}

train::TrainConfig ToyTrainConfig() {
  train::TrainConfig tc;
  tc.epsilon_ls = 0.1;
  tc.warmup_steps = 300;
  tc.epochs = 50;  // ~900 steps with the augmented corpus; peak lr at 300
  tc.checkpoint_every = 250;
  tc.average_last = 2;
  tc.frame_budget = 2000;
  tc.seed = 2;
  return tc;
}

// Trains one scheme on the fixture and returns the averaged model.
model::ModelParams TrainToyModel(const ToyFixture& fx, const SymbolVocab& vocab,
                                 Scheme scheme, const std::string& dir,
                                 const corpus::Manifest& manifest,
                                 const train::TrainConfig& tc, double* final_loss) {
  std::vector<train::TrainItem> items =
      train::PrepareItems(manifest, fx.train_arch, fx.merges, vocab, scheme);
  train::TrainOptions opts;
  opts.model_cfg = DeskConfig(vocab.Size(), fx.fc.n_mels * (fx.fc.left_stack + 1));
  opts.train_cfg = tc;
  opts.vocab_hash = vocab.Hash();
  opts.out_dir = dir;
  std::filesystem::create_directories(dir);
  opts.log_path = dir + "/train.jsonl";
  train::TrainResult tr = train::Train(items, opts);
  if (final_loss != nullptr) *final_loss = tr.final_loss;
  size_t k = std::min<size_t>(tc.average_last, tr.checkpoint_paths.size());
  std::vector<std::string> last(tr.checkpoint_paths.end() - k, tr.checkpoint_paths.end());
  return train::AverageCheckpoints(last);
}

SymbolVocab ToyVocab(const ToyFixture& fx, const corpus::Manifest& manifest,
                     const std::vector<std::string>& langs, Scheme scheme) {
  std::vector<std::string> units;
  for (const corpus::Record& r : manifest.records) {
    bpe::SubwordSeq seq = bpe::EncodeText(r.transcript, fx.merges);
    units.insert(units.end(), seq.begin(), seq.end());
  }
  return SymbolVocab::Build(units, langs, scheme);
}

// Which language the characters of a (marker-stripped) sub-word belong to;
// "" when mixed or unknown.
std::string SubwordLanguage(const ToyFixture& fx, const std::string& unit) {
  std::string bare = unit;
  if (bare.size() >= 2 && bare.compare(bare.size() - 2, 2, "@@") == 0) {
    bare = bare.substr(0, bare.size() - 2);
  }
  for (const auto& [code, chars] : fx.lang_chars) {
    bool all = !bare.empty();
    for (char c : bare) all = all && chars.count(c) > 0;
    if (all) return code;
  }
  return "";
}

struct ToyOutcome {
  double ter = 1.0;
  double forced_purity = 0.0;
  double first_symbol_rate = 0.0;
  double lang_id_accuracy = 0.0;
  double wrong_purity = 0.0;
};
ToyOutcome g_toy;  // filled by criterion 8, reused nowhere else
std::optional<ToyFixture> g_fixture;  // shared between criteria 8 and 9

std::string CheckToyBilingual() {
  auto t0 = std::chrono::steady_clock::now();
  const std::string dir = kWorkDir + "/toy";
  g_fixture = BuildToyFixture(dir);
  const ToyFixture& fx = *g_fixture;

  decode::DecodeConfig dc;
  dc.beam = 8;
  dc.max_len_cap = 40;

  // --- scheme B2: train, decode with the correct forced language ---
  SymbolVocab vocab_b2 = ToyVocab(fx, fx.corpus.train, {"AA", "BB"}, Scheme::kB2);
  double loss_b2 = 0.0;
  model::ModelParams model_b2 =
      TrainToyModel(fx, vocab_b2, Scheme::kB2, dir + "/b2", fx.train_feat,
                    ToyTrainConfig(), &loss_b2);

  int64_t edit_sum = 0, ref_sum = 0, in_lang = 0, emitted = 0;
  for (const corpus::Record& r : fx.test_feat.records) {
    const frontend::FeatureMatrix& feats =
        fx.test_arch.Get(featio::ParseFeatureRef(r.feature_ref).second);
    std::vector<decode::Hypothesis> hs =
        decode::BeamSearch(model_b2, vocab_b2, Scheme::kB2, feats, dc, r.language);
    lex::StrippedSequence hyp = lex::StripTags(hs.front().ids, Scheme::kB2, vocab_b2);
    bpe::SubwordSeq ref = bpe::EncodeText(r.transcript, fx.merges);
    score::EditCounts ec = score::EditDistance(ref, hyp.units);
    edit_sum += ec.sub + ec.ins + ec.del;
    ref_sum += ec.ref_len;
    for (const std::string& u : hyp.units) {
      ++emitted;
      if (SubwordLanguage(fx, u) == r.language) ++in_lang;
    }
  }
  g_toy.ter = static_cast<double>(edit_sum) / static_cast<double>(ref_sum);
  g_toy.forced_purity =
      emitted == 0 ? 0.0 : static_cast<double>(in_lang) / static_cast<double>(emitted);

  // --- wrong-language forcing on the same B2 model ---
  int64_t wrong_in_lang = 0, wrong_emitted = 0;
  for (const corpus::Record& r : fx.test_feat.records) {
    const frontend::FeatureMatrix& feats =
        fx.test_arch.Get(featio::ParseFeatureRef(r.feature_ref).second);
    std::string other = r.language == "AA" ? "BB" : "AA";
    std::vector<decode::Hypothesis> hs =
        decode::BeamSearch(model_b2, vocab_b2, Scheme::kB2, feats, dc, other);
    lex::StrippedSequence hyp = lex::StripTags(hs.front().ids, Scheme::kB2, vocab_b2);
    for (const std::string& u : hyp.units) {
      ++wrong_emitted;
      if (SubwordLanguage(fx, u) == other) ++wrong_in_lang;
    }
  }
  g_toy.wrong_purity = wrong_emitted == 0 ? 0.0
                                          : static_cast<double>(wrong_in_lang) /
                                                static_cast<double>(wrong_emitted);

  // --- scheme B: train, decode unforced, check language identification ---
  SymbolVocab vocab_b = ToyVocab(fx, fx.corpus.train, {"AA", "BB"}, Scheme::kB);
  double loss_b = 0.0;
  model::ModelParams model_b = TrainToyModel(fx, vocab_b, Scheme::kB, dir + "/b",
                                             fx.train_feat, ToyTrainConfig(), &loss_b);
  int64_t first_sym = 0, lang_ok = 0, utts = 0;
  for (const corpus::Record& r : fx.test_feat.records) {
    const frontend::FeatureMatrix& feats =
        fx.test_arch.Get(featio::ParseFeatureRef(r.feature_ref).second);
    std::vector<decode::Hypothesis> hs =
        decode::BeamSearch(model_b, vocab_b, Scheme::kB, feats, dc, std::nullopt);
    const decode::Hypothesis& best = hs.front();
    ++utts;
    // ids[0] is the start token; the first decoded token follows it.
    if (best.ids.size() >= 2 && vocab_b.IsLangSymbolId(best.ids[1])) ++first_sym;
    if (best.predicted_language == r.language) ++lang_ok;
  }
  g_toy.first_symbol_rate = static_cast<double>(first_sym) / utts;
  g_toy.lang_id_accuracy = static_cast<double>(lang_ok) / utts;

  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  Need(g_toy.ter < 0.10, Fmt("token error rate %.2f%% (budget <10%%)", g_toy.ter * 100));
  Need(g_toy.forced_purity >= 0.99,
       Fmt("forced-language purity %.2f%% (budget >=99%%)", g_toy.forced_purity * 100));
  Need(g_toy.first_symbol_rate >= 0.95,
       Fmt("first-token language symbol rate %.2f%% (budget >=95%%)",
           g_toy.first_symbol_rate * 100));
  Need(g_toy.lang_id_accuracy >= 0.95,
       Fmt("language-id accuracy %.2f%% (budget >=95%%)", g_toy.lang_id_accuracy * 100));
  Need(g_toy.wrong_purity >= 0.90,
       Fmt("wrong-forcing purity %.2f%% (budget >=90%%)", g_toy.wrong_purity * 100));
  Need(secs < 1200.0, Fmt("toy reproduction took %.0fs, budget is 20min", secs));
  return Fmt("(TER %.2f%%, purity %.1f%%, first-sym %.1f%%, lang-id %.1f%%, "
             "wrong-forcing %.1f%%, losses b2=%.3f b=%.3f, %.0fs)",
             g_toy.ter * 100, g_toy.forced_purity * 100, g_toy.first_symbol_rate * 100,
             g_toy.lang_id_accuracy * 100, g_toy.wrong_purity * 100, loss_b2, loss_b,
             secs);
}

std::string CheckTransferInit() {
  // Bit-exactness on the micro model.
  const model::ModelConfig cfg = MicroConfig();
  model::ModelParams pre = model::ModelParams::Init(cfg, 12);
  model::ModelParams post = train::TransferInit(pre, 17, 13);
  const std::set<std::string> replaced = {"embed.e", "out.w", "out.b"};
  for (const auto& [name, t] : pre.tensors) {
    if (replaced.count(name) > 0) continue;
    const nn::Tensor& t2 = post.tensors.at(name);
    Need(t.data.size() == t2.data.size(), "non-output tensor changed shape: " + name);
    for (size_t i = 0; i < t.data.size(); ++i) {
      Need(t.data[i] == t2.data[i], "non-output tensor not bit-exact: " + name);
    }
  }
  Need(post.cfg.vocab_size == 17, "transferred config kept the old vocab size");
  Need(post.tensors.at("embed.e").rows == 17, "embedding rows not at the new size");
  Need(post.tensors.at("out.w").cols == 17, "output columns not at the new size");
  Need(post.tensors.at("out.b").cols == 17, "output bias not at the new size");

  // Paired toy runs: monolingual pretraining, then bilingual fine-tuning
  // from the transferred model vs from scratch. Reported, not judged: the
  // step counts to a fixed loss are the deliverable.
  if (!g_fixture.has_value()) {
    g_fixture = BuildToyFixture(kWorkDir + "/toy");
  }
  const ToyFixture& fx = *g_fixture;
  const std::string dir = kWorkDir + "/transfer";
  std::filesystem::remove_all(dir);

  corpus::Manifest aa_only;
  for (const corpus::Record& r : fx.train_feat.records) {
    if (r.language == "AA") aa_only.records.push_back(r);
  }
  // The monolingual corpus is half the size, so the step budget per epoch is
  // smaller; shorten the warmup so these short runs spend most of their steps
  // at a useful learning rate.
  SymbolVocab vocab_aa = ToyVocab(fx, fx.corpus.train, {"AA"}, Scheme::kB2);
  train::TrainConfig pre_tc = ToyTrainConfig();
  pre_tc.epochs = 35;
  pre_tc.warmup_steps = 150;
  model::ModelParams mono = TrainToyModel(fx, vocab_aa, Scheme::kB2, dir + "/mono",
                                          aa_only, pre_tc, nullptr);

  SymbolVocab vocab_bi = ToyVocab(fx, fx.corpus.train, {"AA", "BB"}, Scheme::kB2);
  model::ModelParams warm = train::TransferInit(mono, vocab_bi.Size(), 3);

  const double threshold = 2.0;
  train::TrainConfig ft_tc = ToyTrainConfig();
  ft_tc.epochs = 10;
  ft_tc.warmup_steps = 150;
  auto steps_to = [&](const model::ModelParams* init, const std::string& out) {
    std::vector<train::TrainItem> items = train::PrepareItems(
        fx.train_feat, fx.train_arch, fx.merges, vocab_bi, Scheme::kB2);
    train::TrainOptions opts;
    opts.model_cfg = DeskConfig(vocab_bi.Size(), fx.fc.n_mels * (fx.fc.left_stack + 1));
    opts.train_cfg = ft_tc;
    opts.vocab_hash = vocab_bi.Hash();
    opts.out_dir = out;
    opts.init = init;
    std::filesystem::create_directories(out);
    opts.log_path = out + "/train.jsonl";
    train::TrainResult tr = train::Train(items, opts);
    for (size_t i = 0; i < tr.loss_curve.size(); ++i) {
      if (tr.loss_curve[i] <= threshold) return static_cast<long long>(i + 1);
    }
    return static_cast<long long>(-1);
  };
  long long warm_steps = steps_to(&warm, dir + "/warm");
  long long cold_steps = steps_to(nullptr, dir + "/cold");

  auto show = [](long long s) {
    return s < 0 ? std::string("not-reached") : std::to_string(s);
  };
  return Fmt("(bit-exact surgery to vocab 17; steps to loss<=%.1f: transfer=%s "
             "random=%s)",
             threshold, show(warm_steps).c_str(), show(cold_steps).c_str());
}

// ---------------------------------------------------------------------------
// 10. Frontend
// ---------------------------------------------------------------------------

std::string CheckFrontend() {
  frontend::FrontendConfig cfg;
  cfg.n_mels = 20;
  const int sr = 8000;
  const int win = 200;  // 25 ms
  const int hop = 80;   // 10 ms

  Rng rng(3141);
  for (int trial = 0; trial < 1000; ++trial) {
    int n = win + static_cast<int>(rng.NextBelow(4000));
    audio::Waveform w;
    w.sample_rate = sr;
    w.utt_id = "frame-" + std::to_string(trial);
    w.samples.resize(n);
    for (double& s : w.samples) s = rng.Uniform(-0.3, 0.3);
    frontend::FeatureMatrix f = frontend::LogMel(w, cfg);
    // Independent count: slide the window until it no longer fits.
    int expect = 0;
    for (int start = 0; start + win <= n; start += hop) ++expect;
    Need(f.frames == expect, Fmt("frame count mismatch at length %d", n));
  }

  // Pooled per-speaker CMVN: after normalization the pooled per-dimension
  // mean is 0 and the pooled population variance is 1.
  std::vector<frontend::FeatureMatrix> mats;
  std::vector<std::string> speakers;
  for (int u = 0; u < 5; ++u) {
    frontend::FeatureMatrix m(10 + u, 4);
    for (double& x : m.data) x = rng.Uniform(-3, 7);
    mats.push_back(std::move(m));
    speakers.push_back(u < 3 ? "spk-a" : "spk-b");
  }
  frontend::CmvnBySpeaker(mats, speakers);
  for (const std::string& who : {"spk-a", "spk-b"}) {
    for (int d = 0; d < 4; ++d) {
      double sum = 0, sq = 0;
      int64_t n = 0;
      for (size_t u = 0; u < mats.size(); ++u) {
        if (speakers[u] != who) continue;
        for (int t = 0; t < mats[u].frames; ++t) {
          double x = mats[u].At(t, d);
          sum += x;
          sq += x * x;
          ++n;
        }
      }
      double mean = sum / n;
      double var = sq / n - mean * mean;
      Need(std::fabs(mean) <= 1e-9, Fmt("pooled mean %.2e after CMVN", mean));
      Need(std::fabs(var - 1.0) <= 1e-9, Fmt("pooled variance %.10f after CMVN", var));
    }
  }

  // Stacking fixture: 10x80 -> 4x320, bases {0,3,6,9}, replicate-padded left.
  frontend::FeatureMatrix f(10, 80);
  for (int t = 0; t < 10; ++t) {
    for (int d = 0; d < 80; ++d) f.data[t * 80 + d] = t * 1000.0 + d;
  }
  frontend::FeatureMatrix s = frontend::StackDownsample(f, 3, 3);
  Need(s.frames == 4 && s.dim == 320, "stack fixture shape is not 4x320");
  const int bases[4] = {0, 3, 6, 9};
  for (int tp = 0; tp < 4; ++tp) {
    for (int k = 0; k <= 3; ++k) {
      int src = std::max(bases[tp] - 3 + k, 0);
      for (int d = 0; d < 80; ++d) {
        Need(s.At(tp, k * 80 + d) == f.At(src, d), "stack fixture value mismatch");
      }
    }
  }
  return "(1000 lengths, pooled CMVN, 10x80->4x320)";
}

// ---------------------------------------------------------------------------
// 11. Scoring
// ---------------------------------------------------------------------------

std::string CheckScoring() {
  Rng rng(1212);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<std::string> ref = oracle::RandTokens(rng, 12, 5);
    std::vector<std::string> hyp = oracle::RandTokens(rng, 12, 5);
    score::EditCounts got = score::EditDistance(ref, hyp);
    score::EditCounts want = oracle::EditDistance(ref, hyp);
    Need(got.sub == want.sub && got.ins == want.ins && got.del == want.del,
         Fmt("edit counts diverged from the oracle on trial %d", trial));
  }

  score::EditCounts c =
      score::EditDistance({"by", "any", "means"}, {"by", "all", "means"});
  Need(c.sub == 1 && c.ins == 0 && c.del == 0 && c.ref_len == 3,
       "one-substitution fixture miscounted");
  double wer = static_cast<double>(c.sub + c.ins + c.del) / c.ref_len;
  Need(std::fabs(wer - 1.0 / 3.0) < 1e-12, "WER is not exactly 1/3");
  return "(1000 pairs + fixture, WER 1/3)";
}

}  // namespace

int main() {
  std::filesystem::create_directories(kWorkDir);
  std::printf("mlasr acceptance suite\n======================\n");

  Criterion("bpe merge learning matches the brute-force oracle (200 corpora, <30s)",
            CheckBpeOracle);
  Criterion("sub-word decode/encode identity (10000 sentences + 'amazing' fixture)",
            CheckRoundTrip);
  Criterion("tagging layouts token-for-token and 548+4=552 accounting",
            CheckSchemeLayouts);
  Criterion("analytic gradients match central differences on every tensor (<60s)",
            CheckGradients);
  Criterion("decoder logits at t are invariant to tokens after t (100 trials)",
            CheckCausality);
  Criterion("lr schedule: 2.853e-4 at (12000,1024,12000), peak exactly at warmup",
            CheckSchedule);
  Criterion("checkpoint averaging: K=20 elementwise mean, K=1 identity",
            CheckAveraging);
  Criterion("toy bilingual b2: error rate, forced-language purity, lang-id, "
            "wrong-forcing (<20min)",
            CheckToyBilingual);
  Criterion("transfer init: bit-exact surgery + paired warm/cold step report",
            CheckTransferInit);
  Criterion("frontend: frame formula (1000 lengths), pooled CMVN, stack fixture",
            CheckFrontend);
  Criterion("edit distance matches the DP oracle (1000 pairs), 'by any means' WER 1/3",
            CheckScoring);

  if (g_failures == 0) {
    std::printf("======================\nall criteria passed\n");
    return 0;
  }
  std::printf("======================\n%d criterion(s) failed\n", g_failures);
  return 1;
}
