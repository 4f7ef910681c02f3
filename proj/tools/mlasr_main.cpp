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

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mlasr/bpe.hpp"
#include "mlasr/checkpoint.hpp"
#include "mlasr/common.hpp"
#include "mlasr/config.hpp"
#include "mlasr/corpus.hpp"
#include "mlasr/decoding.hpp"
#include "mlasr/featio.hpp"
#include "mlasr/frontend.hpp"
#include "mlasr/lexicon.hpp"
#include "mlasr/model.hpp"
#include "mlasr/pipeline.hpp"
#include "mlasr/scoring.hpp"
#include "mlasr/training.hpp"

namespace {

using namespace mlasr;
using json = nlohmann::json;

std::vector<double> ParseCsvDoubles(const std::string& s) {
  std::vector<double> out;
  for (const std::string& part : SplitChar(s, ',')) {
    if (part.empty()) continue;
    try {
      out.push_back(std::stod(part));
    } catch (const std::exception&) {
      throw DataError("bad number in list: '" + part + "'");
    }
  }
  return out;
}

std::vector<int> ParseCsvInts(const std::string& s) {
  std::vector<int> out;
  for (double d : ParseCsvDoubles(s)) out.push_back(static_cast<int>(d));
  return out;
}

std::map<std::string, score::Unit> ParseUnitsArg(const std::string& s) {
  std::map<std::string, score::Unit> units = score::DefaultUnits();
  for (const std::string& part : SplitChar(s, ',')) {
    if (part.empty()) continue;
    size_t eq = part.find('=');
    if (eq == std::string::npos) throw DataError("units must look like LANG=word|char");
    std::string lang = part.substr(0, eq);
    std::transform(lang.begin(), lang.end(), lang.begin(),
                   [](unsigned char c) { return std::toupper(c); });
    units[lang] = score::ParseUnit(part.substr(eq + 1));
  }
  return units;
}

// True when every non-empty line is "word <positive-int>".
bool LooksLikeCounts(const std::string& body) {
  bool any = false;
  size_t start = 0;
  while (start <= body.size()) {
    size_t end = body.find('\n', start);
    if (end == std::string::npos) end = body.size();
    std::string line = body.substr(start, end - start);
    start = end + 1;
    std::vector<std::string> f = SplitWhitespace(line);
    if (f.empty()) {
      if (end == body.size()) break;
      continue;
    }
    if (f.size() != 2) return false;
    for (char c : f[1]) {
      if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    any = true;
    if (end == body.size()) break;
  }
  return any;
}

bpe::WordCounts ReadCountsOrText(const std::string& path) {
  std::string body = ReadFileOrThrow(path);
  if (LooksLikeCounts(body)) {
    bpe::WordCounts counts;
    size_t start = 0;
    while (start <= body.size()) {
      size_t end = body.find('\n', start);
      if (end == std::string::npos) end = body.size();
      std::vector<std::string> f = SplitWhitespace(body.substr(start, end - start));
      if (f.size() == 2) counts[f[0]] += std::stoll(f[1]);
      if (end == body.size()) break;
      start = end + 1;
    }
    return counts;
  }
  return bpe::CountWords(body);
}

// Loads every archive referenced by a featurized manifest.
std::map<std::string, featio::Archive> LoadArchives(const corpus::Manifest& m) {
  std::map<std::string, featio::Archive> archives;
  for (const corpus::Record& r : m.records) {
    if (r.feature_ref.empty()) {
      throw DataError("record lacks feature_ref (featurize first): " + r.utt_id);
    }
    std::string path = featio::ParseFeatureRef(r.feature_ref).first;
    if (archives.count(path) == 0) archives[path] = featio::ReadArchive(path);
  }
  return archives;
}

const frontend::FeatureMatrix& LookupFeatures(
    const std::map<std::string, featio::Archive>& archives, const corpus::Record& r) {
  auto [path, utt] = featio::ParseFeatureRef(r.feature_ref);
  return archives.at(path).Get(utt);
}

void PrintScoreReport(std::ostream& os, const score::ScoreReport& report) {
  os << "| Lang | Unit | Utts | Sub | Ins | Del | RefLen | Error % |\n";
  os << "|---|---|---|---|---|---|---|---|\n";
  char buf[64];
  for (const auto& [lang, ls] : report.per_language) {
    std::snprintf(buf, sizeof(buf), "%.2f", ls.error_rate * 100.0);
    os << "| " << lang << " | " << score::UnitName(ls.unit) << " | " << ls.num_utts
       << " | " << ls.counts.sub << " | " << ls.counts.ins << " | " << ls.counts.del
       << " | " << ls.counts.ref_len << " | " << buf << " |\n";
  }
  std::snprintf(buf, sizeof(buf), "%.2f", report.macro_average * 100.0);
  os << "\nAverage (per-language): " << buf << "%\n";
  std::snprintf(buf, sizeof(buf), "%.2f", report.micro_average * 100.0);
  os << "Micro (pooled): " << buf << "%\n";
}

struct CliArgs {
  // bpe-learn
  std::string input, merges_out;
  int64_t alpha = 60;
  // bpe-apply
  std::string merges_in;
  // featurize
  std::string manifest, out, out_manifest, perturb;
  frontend::FrontendConfig fc;
  // vocab
  std::string scheme = "plain", langs, vocab_out;
  // train
  std::string vocab_path, config_path, init = "random", out_dir, log_path;
  std::vector<std::string> overrides;
  bool transfer = false;
  // average
  std::string ckpt_dir, avg_out;
  int last = 20;
  std::vector<std::string> ckpt_paths;
  // decode
  std::string ckpt, force_lang, hyps_out;
  int beam = 8;
  int max_len_cap = 200;
  bool length_norm = false;
  // score
  std::string refs, hyps, units, report_out;
  // toygen
  std::string toy_out_dir;
  uint64_t seed = 1;
  int symbols_per_lang = 8, words = 24, train_n = 200, test_n = 40;
  corpus::ToySpec toy;
  // pipeline/sweep
  std::string alphas;
};

int RunBpeLearn(const CliArgs& a) {
  bpe::WordCounts counts = ReadCountsOrText(a.input);
  bpe::MergeTable table = bpe::LearnMerges(counts, a.alpha);
  bpe::SaveMergeTable(table, a.merges_out);
  std::cout << "learned " << table.merges.size() << " merges (requested " << a.alpha
            << "), inventory " << table.InventorySize() << "\n";
  return 0;
}

int RunBpeApply(const CliArgs& a) {
  bpe::MergeTable table = bpe::LoadMergeTable(a.merges_in);
  std::string line;
  while (std::getline(std::cin, line)) {
    bpe::SubwordSeq units = bpe::EncodeText(line, table);
    for (size_t i = 0; i < units.size(); ++i) {
      if (i > 0) std::cout << ' ';
      std::cout << units[i];
    }
    std::cout << '\n';
  }
  return 0;
}

int RunFeaturize(CliArgs& a) {
  corpus::Manifest m = corpus::LoadManifest(a.manifest);
  if (!a.perturb.empty()) a.fc.perturb_factors = ParseCsvDoubles(a.perturb);
  corpus::Manifest out =
      pipeline::FeaturizeManifest(m, a.fc, a.out, !a.fc.perturb_factors.empty());
  std::string out_manifest = a.out_manifest.empty() ? a.out + ".jsonl" : a.out_manifest;
  corpus::SaveManifest(out_manifest, out);
  std::cout << "featurized " << out.records.size() << " utterances -> " << a.out << "\n"
            << "manifest: " << out_manifest << "\n";
  return 0;
}

int RunVocab(const CliArgs& a) {
  corpus::Manifest m = corpus::LoadManifest(a.manifest);
  bpe::MergeTable merges = bpe::LoadMergeTable(a.merges_in);
  lex::Scheme scheme = lex::ParseScheme(a.scheme);
  std::vector<std::string> langs =
      a.langs.empty() ? m.Languages() : SplitChar(a.langs, ',');
  std::vector<std::string> units;
  for (const corpus::Record& r : m.records) {
    bpe::SubwordSeq seq = bpe::EncodeText(r.transcript, merges);
    units.insert(units.end(), seq.begin(), seq.end());
  }
  lex::SymbolVocab vocab = lex::SymbolVocab::Build(units, langs, scheme);
  vocab.Save(a.vocab_out);
  lex::VocabAccounting acc = vocab.Accounting();
  std::cout << "vocab: " << acc.subwords << " sub-words + " << acc.specials
            << " specials";
  if (acc.lang_symbols > 0) std::cout << " + " << acc.lang_symbols << " language symbols";
  std::cout << " = " << vocab.Size() << "\n";
  return 0;
}

model::ModelConfig ModelConfigFor(const config::ExperimentConfig& cfg,
                                  const lex::SymbolVocab& vocab, int feat_dim) {
  model::ModelConfig mc = cfg.model;
  mc.vocab_size = vocab.Size();
  mc.feat_dim = feat_dim;
  mc.Validate();
  return mc;
}

int RunTrain(const CliArgs& a) {
  config::ExperimentConfig cfg;
  if (!a.config_path.empty()) {
    cfg = config::ExperimentConfig::FromFile(a.config_path, a.overrides);
  } else if (!a.overrides.empty()) {
    json j = cfg.ToJson();
    for (const std::string& o : a.overrides) config::ApplyOverride(j, o);
    cfg = config::ExperimentConfig::FromJson(j);
  }
  corpus::Manifest m = corpus::LoadManifest(a.manifest);
  bpe::MergeTable merges = bpe::LoadMergeTable(a.merges_in);
  lex::SymbolVocab vocab = lex::SymbolVocab::Load(a.vocab_path);
  lex::Scheme scheme = lex::ParseScheme(a.scheme);

  auto archives = LoadArchives(m);
  const frontend::FeatureMatrix& probe = LookupFeatures(archives, m.records.front());
  model::ModelConfig mc = ModelConfigFor(cfg, vocab, probe.dim);

  // PrepareItems expects one archive; merge them.
  featio::Archive merged;
  for (auto& [path, arch] : archives) {
    for (auto& [utt, feats] : arch.utts) {
      if (merged.index.count(utt) != 0) throw DataError("duplicate utterance: " + utt);
      merged.index[utt] = merged.utts.size();
      merged.utts.emplace_back(utt, std::move(feats));
    }
  }
  std::vector<train::TrainItem> items =
      train::PrepareItems(m, merged, merges, vocab, scheme);

  train::TrainOptions opts;
  opts.model_cfg = mc;
  opts.train_cfg = cfg.train;
  opts.vocab_hash = vocab.Hash();
  opts.out_dir = a.out_dir;
  opts.log_path = a.log_path.empty() ? a.out_dir + "/train.jsonl" : a.log_path;

  model::ModelParams init_params;
  if (a.init != "random") {
    ckpt::LoadedCheckpoint base = ckpt::LoadCheckpoint(a.init);
    if (a.transfer) {
      init_params = train::TransferInit(base.params, vocab.Size(), cfg.train.seed);
    } else {
      if (base.vocab_hash != vocab.Hash()) {
        throw DataError("init checkpoint was trained with a different vocabulary "
                        "(use --transfer to re-initialize the softmax/embedding)");
      }
      init_params = std::move(base.params);
    }
    opts.init = &init_params;
  }

  train::TrainResult result = train::Train(items, opts);
  std::cout << "trained " << result.steps << " steps, final loss " << result.final_loss
            << ", " << result.checkpoint_paths.size() << " checkpoints in " << a.out_dir
            << "\n";
  return 0;
}

int RunAverage(const CliArgs& a) {
  std::vector<std::string> paths = a.ckpt_paths;
  if (!a.ckpt_dir.empty()) {
    for (const auto& entry : std::filesystem::directory_iterator(a.ckpt_dir)) {
      if (entry.path().extension() == ".ckpt") paths.push_back(entry.path().string());
    }
  }
  if (paths.empty()) throw DataError("average: no checkpoints found");
  std::sort(paths.begin(), paths.end());
  if (static_cast<int>(paths.size()) > a.last) {
    paths.assign(paths.end() - a.last, paths.end());
  }
  uint64_t vocab_hash = 0;
  model::ModelParams avg = train::AverageCheckpoints(paths, &vocab_hash);
  ckpt::SaveCheckpoint(a.avg_out, avg, vocab_hash);
  std::cout << "averaged " << paths.size() << " checkpoints -> " << a.avg_out << "\n";
  return 0;
}

int RunDecode(const CliArgs& a) {
  ckpt::LoadedCheckpoint model = ckpt::LoadCheckpoint(a.ckpt);
  lex::SymbolVocab vocab = lex::SymbolVocab::Load(a.vocab_path);
  if (model.vocab_hash != vocab.Hash()) {
    throw DataError("checkpoint/vocabulary mismatch (different vocab hash)");
  }
  lex::Scheme scheme = lex::ParseScheme(a.scheme);
  corpus::Manifest m = corpus::LoadManifest(a.manifest);
  auto archives = LoadArchives(m);

  decode::DecodeConfig dc;
  dc.beam = a.beam;
  dc.max_len_cap = a.max_len_cap;
  dc.length_norm = a.length_norm;

  std::string out;
  for (const corpus::Record& r : m.records) {
    std::optional<std::string> forced;
    if (scheme == lex::Scheme::kB2) {
      forced = a.force_lang.empty() ? r.language : a.force_lang;
    } else if (!a.force_lang.empty()) {
      throw DataError("--force-lang is only meaningful under scheme b2");
    }
    std::vector<decode::Hypothesis> hyps = decode::BeamSearch(
        model.params, vocab, scheme, LookupFeatures(archives, r), dc, forced);
    const decode::Hypothesis& best = hyps.front();
    json j;
    j["utt_id"] = r.utt_id;
    j["text"] = best.Text(vocab);
    j["log_prob"] = best.log_prob;
    if (best.predicted_language.has_value()) {
      j["predicted_language"] = *best.predicted_language;
    }
    out += j.dump();
    out += '\n';
  }
  WriteFileOrThrow(a.hyps_out, out);
  std::cout << "decoded " << m.records.size() << " utterances -> " << a.hyps_out << "\n";
  return 0;
}

int RunScore(const CliArgs& a) {
  corpus::Manifest refs = corpus::LoadManifest(a.refs);
  std::map<std::string, score::Unit> units =
      a.units.empty() ? score::DefaultUnits() : ParseUnitsArg(a.units);

  std::map<std::string, std::string> hyp_by_id;
  std::string body = ReadFileOrThrow(a.hyps);
  size_t start = 0;
  int line_no = 0;
  while (start < body.size()) {
    size_t end = body.find('\n', start);
    if (end == std::string::npos) end = body.size();
    std::string line = body.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw DataError(a.hyps + " line " + std::to_string(line_no) + ": " + e.what());
    }
    std::string id = j.at("utt_id").get<std::string>();
    if (!hyp_by_id.emplace(id, j.at("text").get<std::string>()).second) {
      throw DataError("duplicate hypothesis for " + id);
    }
  }

  std::vector<score::Utterance> utts;
  for (const corpus::Record& r : refs.records) {
    auto it = hyp_by_id.find(r.utt_id);
    if (it == hyp_by_id.end()) throw DataError("no hypothesis for " + r.utt_id);
    utts.push_back({r.utt_id, r.language, r.transcript, it->second});
    hyp_by_id.erase(it);
  }
  if (!hyp_by_id.empty()) {
    throw DataError("hypothesis without reference: " + hyp_by_id.begin()->first);
  }
  score::ScoreReport report = score::ScoreCorpus(utts, units);
  PrintScoreReport(std::cout, report);
  if (!a.report_out.empty()) {
    std::ostringstream os;
    PrintScoreReport(os, report);
    WriteFileOrThrow(a.report_out, os.str());
  }
  return 0;
}

int RunToygen(CliArgs& a) {
  corpus::ToySpec spec = a.toy;
  spec.seed = a.seed;
  std::vector<std::string> codes =
      a.langs.empty() ? std::vector<std::string>{"AA", "BB"} : SplitChar(a.langs, ',');
  const std::string alphabet = "abcdefghijklmnopqrstuvwxyz";
  size_t next = 0;
  for (const std::string& code : codes) {
    corpus::ToyLanguage lang;
    lang.code = code;
    lang.num_words = a.words;
    lang.num_train = a.train_n;
    lang.num_test = a.test_n;
    for (int i = 0; i < a.symbols_per_lang; ++i) {
      if (next >= alphabet.size()) {
        throw DataError("toygen: more symbols requested than available letters");
      }
      lang.symbols.push_back(std::string(1, alphabet[next++]));
    }
    spec.languages.push_back(std::move(lang));
  }
  corpus::ToyCorpus corpus = corpus::GenerateToyCorpus(spec, a.toy_out_dir);
  std::cout << "toy corpus: " << corpus.train.records.size() << " train / "
            << corpus.test.records.size() << " test utterances in " << a.toy_out_dir
            << "\n";
  return 0;
}

int RunPipelineCmd(const CliArgs& a) {
  config::ExperimentConfig cfg =
      config::ExperimentConfig::FromFile(a.config_path, a.overrides);
  pipeline::PipelineResult result = pipeline::RunPipeline(cfg);
  std::cout << ReadFileOrThrow(result.report_md);
  return 0;
}

int RunSweep(const CliArgs& a) {
  config::ExperimentConfig cfg =
      config::ExperimentConfig::FromFile(a.config_path, a.overrides);
  std::vector<int> alphas = ParseCsvInts(a.alphas);
  pipeline::SweepAlpha(cfg, alphas);
  std::cout << ReadFileOrThrow(cfg.paths.work_dir + "/sweep.md");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mlasr: multilingual sequence-to-sequence speech recognition toolkit"};
  app.require_subcommand(1);
  CliArgs a;
  int rc = 0;

  CLI::App* learn = app.add_subcommand("bpe-learn", "learn BPE merges from text or word counts");
  learn->add_option("--input", a.input, "text file or 'word count' lines")->required();
  learn->add_option("--merges", a.merges_out, "output merge table")->required();
  learn->add_option("--alpha", a.alpha, "number of merge operations")->required();
  learn->callback([&] { rc = RunBpeLearn(a); });

  CLI::App* apply = app.add_subcommand("bpe-apply", "apply merges to stdin text, stdout sub-words");
  apply->add_option("--merges", a.merges_in, "merge table")->required();
  apply->callback([&] { rc = RunBpeApply(a); });

  CLI::App* feat = app.add_subcommand("featurize", "waveforms to stacked log-mel archive");
  feat->add_option("--manifest", a.manifest, "input manifest (audio paths)")->required();
  feat->add_option("--out", a.out, "output feature archive")->required();
  feat->add_option("--out-manifest", a.out_manifest, "output manifest (default <out>.jsonl)");
  feat->add_option("--perturb", a.perturb, "speed factors, e.g. 0.9,1.1");
  feat->add_option("--n-mels", a.fc.n_mels);
  feat->add_option("--window-ms", a.fc.window_ms);
  feat->add_option("--shift-ms", a.fc.shift_ms);
  feat->add_option("--left-stack", a.fc.left_stack);
  feat->add_option("--downsample", a.fc.downsample);
  feat->add_option("--dither", a.fc.dither);
  feat->add_option("--fmin", a.fc.fmin);
  feat->add_option("--fmax", a.fc.fmax, "0 = Nyquist");
  feat->callback([&] { rc = RunFeaturize(a); });

  CLI::App* voc = app.add_subcommand("vocab", "build the symbol vocabulary");
  voc->add_option("--manifest", a.manifest, "manifest with transcripts")->required();
  voc->add_option("--merges", a.merges_in, "merge table")->required();
  voc->add_option("--scheme", a.scheme, "plain|b|e|b2")->required();
  voc->add_option("--langs", a.langs, "language codes (default: from manifest)");
  voc->add_option("--out", a.vocab_out, "output vocab file")->required();
  voc->callback([&] { rc = RunVocab(a); });

  CLI::App* tr = app.add_subcommand("train", "train the ASR Transformer");
  tr->add_option("--manifest", a.manifest, "featurized manifest")->required();
  tr->add_option("--vocab", a.vocab_path, "vocab file")->required();
  tr->add_option("--merges", a.merges_in, "merge table")->required();
  tr->add_option("--scheme", a.scheme, "plain|b|e|b2")->required();
  tr->add_option("--config", a.config_path, "experiment config JSON");
  tr->add_option("--set", a.overrides, "config override key.path=value");
  tr->add_option("--init", a.init, "checkpoint path or 'random'");
  tr->add_flag("--transfer", a.transfer, "re-init softmax/embedding from --init");
  tr->add_option("--out-dir", a.out_dir, "checkpoint directory")->required();
  tr->add_option("--log", a.log_path, "JSONL training log");
  tr->callback([&] { rc = RunTrain(a); });

  CLI::App* avg = app.add_subcommand("average", "average trailing checkpoints");
  avg->add_option("--dir", a.ckpt_dir, "directory of .ckpt files");
  avg->add_option("--inputs", a.ckpt_paths, "explicit checkpoint paths");
  avg->add_option("--last", a.last, "how many trailing checkpoints");
  avg->add_option("--out", a.avg_out, "output checkpoint")->required();
  avg->callback([&] { rc = RunAverage(a); });

  CLI::App* dec = app.add_subcommand("decode", "beam-search decode a featurized manifest");
  dec->add_option("--ckpt", a.ckpt, "model checkpoint")->required();
  dec->add_option("--manifest", a.manifest, "featurized manifest")->required();
  dec->add_option("--vocab", a.vocab_path, "vocab file")->required();
  dec->add_option("--scheme", a.scheme, "plain|b|e|b2")->required();
  dec->add_option("--force-lang", a.force_lang, "forced language symbol (b2)");
  dec->add_option("--beam", a.beam);
  dec->add_option("--max-len", a.max_len_cap, "max hypothesis length cap");
  dec->add_flag("--length-norm", a.length_norm, "normalize scores by length");
  dec->add_option("--out", a.hyps_out, "hypotheses JSONL")->required();
  dec->callback([&] { rc = RunDecode(a); });

  CLI::App* sc = app.add_subcommand("score", "WER/CER against reference transcripts");
  sc->add_option("--refs", a.refs, "reference manifest")->required();
  sc->add_option("--hyps", a.hyps, "hypotheses JSONL")->required();
  sc->add_option("--units", a.units, "per-language units, e.g. ma=char,ja=char");
  sc->add_option("--out", a.report_out, "also write the table here");
  sc->callback([&] { rc = RunScore(a); });

  CLI::App* toy = app.add_subcommand("toygen", "generate the synthetic multilingual corpus");
  toy->add_option("--out-dir", a.toy_out_dir)->required();
  toy->add_option("--seed", a.seed);
  toy->add_option("--langs", a.langs, "codes, default AA,BB");
  toy->add_option("--symbols-per-lang", a.symbols_per_lang);
  toy->add_option("--words", a.words, "distinct words per language");
  toy->add_option("--train", a.train_n, "training utterances per language");
  toy->add_option("--test", a.test_n, "test utterances per language");
  toy->add_option("--sample-rate", a.toy.sample_rate);
  toy->add_option("--min-words", a.toy.min_words);
  toy->add_option("--max-words", a.toy.max_words);
  toy->add_option("--min-syms", a.toy.min_syms);
  toy->add_option("--max-syms", a.toy.max_syms);
  toy->add_option("--tone-ms", a.toy.tone_ms);
  toy->add_option("--gap-ms", a.toy.gap_ms);
  toy->add_option("--noise", a.toy.noise);
  toy->add_option("--speakers", a.toy.speakers_per_language);
  toy->callback([&] { rc = RunToygen(a); });

  CLI::App* pipe = app.add_subcommand("pipeline", "run the full experiment pipeline");
  pipe->add_option("--config", a.config_path, "experiment config JSON")->required();
  pipe->add_option("--set", a.overrides, "config override key.path=value");
  pipe->callback([&] { rc = RunPipelineCmd(a); });

  CLI::App* sweep = app.add_subcommand("sweep", "pipeline once per alpha, collated table");
  sweep->add_option("--config", a.config_path, "experiment config JSON")->required();
  sweep->add_option("--alphas", a.alphas, "comma-separated merge budgets")->required();
  sweep->add_option("--set", a.overrides, "config override key.path=value");
  sweep->callback([&] { rc = RunSweep(a); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const NumericError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return rc;
}
