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

#include "mlasr/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <set>

#include "mlasr/bpe.hpp"
#include "mlasr/checkpoint.hpp"
#include "mlasr/common.hpp"
#include "mlasr/decoding.hpp"
#include "mlasr/featio.hpp"
#include "mlasr/lexicon.hpp"
#include "mlasr/training.hpp"
#include "mlasr/wav.hpp"

namespace mlasr {
namespace pipeline {

namespace {

std::string FactorTag(double f) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "sp%g-", f);
  return buf;
}

template <typename F>
auto Stage(const std::string& name, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const NumericError& e) {
    throw NumericError("stage " + name + ": " + e.what());
  } catch (const std::exception& e) {
    throw DataError("stage " + name + ": " + e.what());
  }
}

std::string Percent(double rate) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", rate * 100.0);
  return buf;
}

}  // namespace

corpus::Manifest FeaturizeManifest(const corpus::Manifest& in,
                                   const frontend::FrontendConfig& fc,
                                   const std::string& archive_path, bool augment) {
  struct Pending {
    corpus::Record rec;
    frontend::FeatureMatrix feats;
  };
  std::vector<Pending> pending;
  std::vector<double> factors;
  if (augment) {
    for (double f : fc.perturb_factors) {
      if (f != 1.0) factors.push_back(f);
    }
  }

  auto add = [&](const corpus::Record& base, const audio::Waveform& w,
                 const std::string& prefix) {
    Pending p;
    p.rec = base;
    p.rec.utt_id = prefix + base.utt_id;
    p.rec.speaker_id = prefix + base.speaker_id;
    p.rec.audio_path.clear();
    p.rec.feature_ref = archive_path + "#" + p.rec.utt_id;
    p.feats = frontend::LogMel(w, fc);
    pending.push_back(std::move(p));
  };

  // Originals first, then one block per perturbation factor.
  std::vector<audio::Waveform> loaded;
  loaded.reserve(in.records.size());
  for (const corpus::Record& r : in.records) {
    if (r.audio_path.empty()) {
      throw DataError("featurize: record has no audio_path: " + r.utt_id);
    }
    audio::Waveform w = audio::ReadWav(r.audio_path);
    w.utt_id = r.utt_id;
    add(r, w, "");
    loaded.push_back(std::move(w));
  }
  for (double f : factors) {
    for (size_t i = 0; i < in.records.size(); ++i) {
      audio::Waveform pw = frontend::SpeedPerturb(loaded[i], f);
      pw.utt_id = FactorTag(f) + loaded[i].utt_id;
      add(in.records[i], pw, FactorTag(f));
    }
  }

  // Speaker-level CMVN over raw log-mel, then stacking.
  std::vector<frontend::FeatureMatrix> mats;
  std::vector<std::string> speakers;
  mats.reserve(pending.size());
  for (Pending& p : pending) {
    mats.push_back(std::move(p.feats));
    speakers.push_back(p.rec.speaker_id);
  }
  frontend::CmvnBySpeaker(mats, speakers);

  featio::ArchiveWriter writer(archive_path);
  corpus::Manifest out;
  for (size_t i = 0; i < pending.size(); ++i) {
    frontend::FeatureMatrix stacked =
        frontend::StackDownsample(mats[i], fc.left_stack, fc.downsample);
    writer.Add(pending[i].rec.utt_id, stacked);
    out.records.push_back(std::move(pending[i].rec));
  }
  writer.Close();
  return out;
}

namespace {

struct PreparedCorpus {
  corpus::Manifest train_raw;   // with audio paths + transcripts
  corpus::Manifest test_raw;
  corpus::Manifest train_feat;  // with feature refs
  corpus::Manifest test_feat;
  featio::Archive train_archive;
  featio::Archive test_archive;
  std::vector<std::string> languages;
};

PreparedCorpus PrepareCorpus(const config::ExperimentConfig& cfg) {
  PreparedCorpus pc;
  const std::string& work = cfg.paths.work_dir;
  std::filesystem::create_directories(work);

  Stage("corpus", [&] {
    if (cfg.toy.has_value()) {
      corpus::ToyCorpus toy = corpus::GenerateToyCorpus(*cfg.toy, work + "/corpus");
      pc.train_raw = std::move(toy.train);
      pc.test_raw = std::move(toy.test);
    } else {
      if (cfg.paths.train_manifest.empty() || cfg.paths.test_manifest.empty()) {
        throw DataError("config needs a toy block or train/test manifests");
      }
      pc.train_raw = corpus::LoadManifest(cfg.paths.train_manifest);
      pc.test_raw = corpus::LoadManifest(cfg.paths.test_manifest);
    }
    pc.languages = pc.train_raw.Languages();
    return 0;
  });

  Stage("featurize", [&] {
    std::string train_arch = work + "/train.mlfa";
    std::string test_arch = work + "/test.mlfa";
    pc.train_feat = FeaturizeManifest(pc.train_raw, cfg.frontend, train_arch, true);
    corpus::SaveManifest(work + "/train_feats.jsonl", pc.train_feat);
    pc.test_feat = FeaturizeManifest(pc.test_raw, cfg.frontend, test_arch, false);
    corpus::SaveManifest(work + "/test_feats.jsonl", pc.test_feat);
    pc.train_archive = featio::ReadArchive(train_arch);
    pc.test_archive = featio::ReadArchive(test_arch);
    return 0;
  });
  return pc;
}

SchemeResult RunScheme(const config::ExperimentConfig& cfg, const PreparedCorpus& pc,
                       const bpe::MergeTable& merges, const std::string& scheme_name) {
  const lex::Scheme scheme = lex::ParseScheme(scheme_name);
  const std::string dir = cfg.paths.work_dir + "/" + scheme_name;
  std::filesystem::create_directories(dir);
  SchemeResult result;
  result.scheme = scheme_name;

  lex::SymbolVocab vocab = Stage("vocab", [&] {
    std::vector<std::string> units;
    for (const corpus::Record& r : pc.train_raw.records) {
      bpe::SubwordSeq seq = bpe::EncodeText(r.transcript, merges);
      units.insert(units.end(), seq.begin(), seq.end());
    }
    lex::SymbolVocab v = lex::SymbolVocab::Build(units, pc.languages, scheme);
    v.Save(dir + "/vocab.txt");
    return v;
  });
  result.vocab_size = vocab.Size();

  model::ModelConfig mc = cfg.model;
  mc.vocab_size = vocab.Size();
  mc.feat_dim = cfg.frontend.n_mels * (cfg.frontend.left_stack + 1);
  mc.Validate();

  train::TrainResult tr = Stage("train", [&] {
    std::vector<train::TrainItem> items =
        train::PrepareItems(pc.train_feat, pc.train_archive, merges, vocab, scheme);
    train::TrainOptions opts;
    opts.model_cfg = mc;
    opts.train_cfg = cfg.train;
    opts.vocab_hash = vocab.Hash();
    opts.out_dir = dir + "/ckpts";
    opts.log_path = dir + "/train.jsonl";
    return train::Train(items, opts);
  });

  result.model_path = Stage("average", [&] {
    size_t k = std::min<size_t>(cfg.train.average_last, tr.checkpoint_paths.size());
    std::vector<std::string> last(tr.checkpoint_paths.end() - k,
                                  tr.checkpoint_paths.end());
    uint64_t vh = 0;
    model::ModelParams avg = train::AverageCheckpoints(last, &vh);
    std::string path = dir + "/model.ckpt";
    ckpt::SaveCheckpoint(path, avg, vh);
    return path;
  });

  ckpt::LoadedCheckpoint model = ckpt::LoadCheckpoint(result.model_path);
  if (model.vocab_hash != vocab.Hash()) {
    throw DataError("averaged model does not match the vocabulary");
  }

  struct Decoded {
    std::string utt_id, language, ref, hyp;
    std::optional<std::string> predicted_language;
  };
  std::vector<Decoded> decoded = Stage("decode", [&] {
    decode::DecodeConfig dc;
    dc.beam = cfg.decode.beam;
    dc.max_len_cap = cfg.decode.max_len_cap;
    dc.length_norm = cfg.decode.length_norm;
    std::vector<Decoded> out;
    std::string hyps;
    for (const corpus::Record& r : pc.test_feat.records) {
      const frontend::FeatureMatrix& feats =
          pc.test_archive.Get(featio::ParseFeatureRef(r.feature_ref).second);
      std::optional<std::string> forced;
      if (scheme == lex::Scheme::kB2) forced = r.language;
      std::vector<decode::Hypothesis> hs =
          decode::BeamSearch(model.params, vocab, scheme, feats, dc, forced);
      const decode::Hypothesis& best = hs.front();
      Decoded d;
      d.utt_id = r.utt_id;
      d.language = r.language;
      d.ref = r.transcript;
      d.hyp = best.Text(vocab);
      d.predicted_language = best.predicted_language;
      nlohmann::json hj;
      hj["utt_id"] = d.utt_id;
      hj["text"] = d.hyp;
      hj["log_prob"] = best.log_prob;
      if (d.predicted_language.has_value()) hj["predicted_language"] = *d.predicted_language;
      hyps += hj.dump();
      hyps += '\n';
      out.push_back(std::move(d));
    }
    result.hyps_path = dir + "/hyps.jsonl";
    WriteFileOrThrow(result.hyps_path, hyps);
    return out;
  });

  Stage("score", [&] {
    std::vector<score::Utterance> utts;
    int64_t lang_hits = 0, lang_total = 0;
    for (const Decoded& d : decoded) {
      utts.push_back({d.utt_id, d.language, d.ref, d.hyp});
      if (scheme != lex::Scheme::kPlain) {
        ++lang_total;
        if (d.predicted_language.has_value() && *d.predicted_language == d.language) {
          ++lang_hits;
        }
      }
    }
    result.report = score::ScoreCorpus(utts, cfg.score_units);
    if (lang_total > 0) {
      result.lang_id_accuracy =
          static_cast<double>(lang_hits) / static_cast<double>(lang_total);
    }
    return 0;
  });
  return result;
}

void WriteReports(const config::ExperimentConfig& cfg, PipelineResult& result,
                  const std::vector<std::string>& languages, int alpha) {
  char hash_buf[32];
  std::snprintf(hash_buf, sizeof(hash_buf), "%016llx",
                static_cast<unsigned long long>(result.config_hash));

  std::string md;
  md += "# mlasr pipeline report\n\n";
  md += "- config: " + std::string(hash_buf) + "\n";
  md += "- seed: " + std::to_string(cfg.seed) + "\n";
  md += "- alpha: " + std::to_string(alpha) + "\n\n";
  md += "Error rates in %. Average is the unweighted per-language mean; ";
  md += "Micro pools counts over all utterances.\n\n";
  md += "| Scheme | Vocab |";
  for (const std::string& lang : languages) md += " " + lang + " |";
  md += " Average | Micro | LangID |\n";
  md += "|---|---|";
  for (size_t i = 0; i < languages.size(); ++i) md += "---|";
  md += "---|---|---|\n";

  std::string csv = "scheme,vocab";
  for (const std::string& lang : languages) csv += "," + lang;
  csv += ",average,micro,lang_id\n";

  for (const SchemeResult& sr : result.schemes) {
    md += "| " + sr.scheme + " | " + std::to_string(sr.vocab_size) + " |";
    csv += sr.scheme + "," + std::to_string(sr.vocab_size);
    for (const std::string& lang : languages) {
      auto it = sr.report.per_language.find(lang);
      std::string cell = it != sr.report.per_language.end()
                             ? Percent(it->second.error_rate)
                             : std::string("-");
      md += " " + cell + " |";
      csv += "," + cell;
    }
    std::string lang_id = sr.lang_id_accuracy < 0.0 ? std::string("-")
                                                    : Percent(sr.lang_id_accuracy);
    md += " " + Percent(sr.report.macro_average) + " | " +
          Percent(sr.report.micro_average) + " | " + lang_id + " |\n";
    csv += "," + Percent(sr.report.macro_average) + "," +
           Percent(sr.report.micro_average) + "," + lang_id + "\n";
  }

  result.report_md = cfg.paths.work_dir + "/report.md";
  result.report_csv = cfg.paths.work_dir + "/report.csv";
  WriteFileOrThrow(result.report_md, md);
  WriteFileOrThrow(result.report_csv, csv);
}

}  // namespace

PipelineResult RunPipeline(const config::ExperimentConfig& cfg) {
  PipelineResult result;
  result.config_hash = cfg.Hash();
  PreparedCorpus pc = PrepareCorpus(cfg);

  bpe::MergeTable merges = Stage("bpe-learn", [&] {
    bpe::WordCounts counts;
    for (const corpus::Record& r : pc.train_raw.records) {
      for (const std::string& w : SplitWhitespace(r.transcript)) ++counts[w];
    }
    bpe::MergeTable t = bpe::LearnMerges(counts, cfg.alpha);
    bpe::SaveMergeTable(t, cfg.paths.work_dir + "/merges.txt");
    return t;
  });

  for (const std::string& scheme : cfg.schemes) {
    result.schemes.push_back(RunScheme(cfg, pc, merges, scheme));
  }
  WriteReports(cfg, result, pc.languages, cfg.alpha);
  return result;
}

std::vector<SweepRow> SweepAlpha(const config::ExperimentConfig& cfg,
                                 const std::vector<int>& alphas) {
  if (alphas.empty()) throw DataError("sweep: no alphas given");
  {
    std::set<int> distinct(alphas.begin(), alphas.end());
    if (distinct.size() != alphas.size() || *distinct.begin() < 1) {
      throw DataError("sweep: alphas must be distinct positive integers");
    }
  }
  std::vector<SweepRow> rows;
  for (int alpha : alphas) {
    config::ExperimentConfig sub = cfg;
    sub.alpha = alpha;
    sub.schemes = {cfg.schemes.front()};
    sub.paths.work_dir = cfg.paths.work_dir + "/sweep-alpha-" + std::to_string(alpha);
    PipelineResult pr = RunPipeline(sub);
    rows.push_back({alpha, pr.schemes[0].vocab_size, pr.schemes[0].report.macro_average});
  }

  std::string md = "# alpha sweep (" + cfg.schemes.front() + ")\n\n";
  md += "| alpha | vocab | error % |\n|---|---|---|\n";
  std::string csv = "alpha,vocab,error_pct\n";
  for (const SweepRow& r : rows) {
    md += "| " + std::to_string(r.alpha) + " | " + std::to_string(r.vocab_size) + " | " +
          Percent(r.error_rate) + " |\n";
    csv += std::to_string(r.alpha) + "," + std::to_string(r.vocab_size) + "," +
           Percent(r.error_rate) + "\n";
  }
  std::filesystem::create_directories(cfg.paths.work_dir);
  WriteFileOrThrow(cfg.paths.work_dir + "/sweep.md", md);
  WriteFileOrThrow(cfg.paths.work_dir + "/sweep.csv", csv);
  return rows;
}

}  // namespace pipeline
}  // namespace mlasr
