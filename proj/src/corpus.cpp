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

#include "mlasr/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mlasr/common.hpp"
#include "mlasr/rng.hpp"
#include "mlasr/wav.hpp"

namespace mlasr {
namespace corpus {

using json = nlohmann::json;

std::map<std::string, int64_t> Manifest::CountsByLanguage() const {
  std::map<std::string, int64_t> counts;
  for (const Record& r : records) ++counts[r.language];
  return counts;
}

std::vector<std::string> Manifest::Languages() const {
  std::set<std::string> langs;
  for (const Record& r : records) langs.insert(r.language);
  return {langs.begin(), langs.end()};
}

const Record& Manifest::Find(const std::string& utt_id) const {
  for (const Record& r : records) {
    if (r.utt_id == utt_id) return r;
  }
  throw DataError("utterance not in manifest: " + utt_id);
}

Manifest LoadManifest(const std::string& path,
                      const std::vector<std::string>* allowed_langs) {
  std::string body = ReadFileOrThrow(path);
  Manifest m;
  std::set<std::string> seen_ids;
  std::istringstream in(body);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fail = [&](const std::string& why) -> DataError {
      return DataError(path + " line " + std::to_string(line_no) + ": " + why);
    };
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw fail(std::string("malformed JSON (") + e.what() + ")");
    }
    if (!j.is_object()) throw fail("record is not a JSON object");
    Record r;
    auto str_field = [&](const char* key, bool required) -> std::string {
      if (!j.contains(key)) {
        if (required) throw fail(std::string("missing field '") + key + "'");
        return "";
      }
      if (!j[key].is_string()) throw fail(std::string("field '") + key + "' must be a string");
      return j[key].get<std::string>();
    };
    r.utt_id = str_field("utt_id", true);
    r.speaker_id = str_field("speaker_id", true);
    r.language = str_field("language", true);
    r.audio_path = str_field("audio_path", false);
    r.feature_ref = str_field("feature_ref", false);
    r.transcript = str_field("transcript", false);
    if (r.utt_id.empty()) throw fail("empty utt_id");
    if (r.audio_path.empty() == r.feature_ref.empty()) {
      throw fail("exactly one of audio_path/feature_ref required");
    }
    if (!seen_ids.insert(r.utt_id).second) throw fail("duplicate utt_id '" + r.utt_id + "'");
    if (allowed_langs != nullptr &&
        std::find(allowed_langs->begin(), allowed_langs->end(), r.language) ==
            allowed_langs->end()) {
      throw fail("unknown language '" + r.language + "'");
    }
    m.records.push_back(std::move(r));
  }
  if (m.records.empty()) throw DataError("empty manifest: " + path);
  return m;
}

void SaveManifest(const std::string& path, const Manifest& m) {
  std::string out;
  for (const Record& r : m.records) {
    json j;
    j["utt_id"] = r.utt_id;
    j["speaker_id"] = r.speaker_id;
    j["language"] = r.language;
    if (!r.audio_path.empty()) j["audio_path"] = r.audio_path;
    if (!r.feature_ref.empty()) j["feature_ref"] = r.feature_ref;
    if (!r.transcript.empty()) j["transcript"] = r.transcript;
    out += j.dump();
    out += '\n';
  }
  WriteFileOrThrow(path, out);
}

// Constant-ratio ladder: speed perturbation scales every frequency by the
// same factor, so as long as that factor stays below the 1.2 step, a
// perturbed tone can never cross a neighboring symbol's frequency.
double ToneHz(int global_symbol_index) {
  return 250.0 * std::pow(1.2, global_symbol_index);
}

namespace {

// Tone segment with short linear ramps so segment edges stay clean.
void AppendTone(std::vector<double>& samples, double hz, double amp, int n, int sr) {
  const double kPi = 3.14159265358979323846;
  const int ramp = std::min(n / 8, sr / 200);  // 5 ms
  for (int i = 0; i < n; ++i) {
    double env = 1.0;
    if (i < ramp) env = static_cast<double>(i) / ramp;
    if (n - 1 - i < ramp) env = std::min(env, static_cast<double>(n - 1 - i) / ramp);
    samples.push_back(amp * env * std::sin(2.0 * kPi * hz * i / sr));
  }
}

}  // namespace

ToyCorpus GenerateToyCorpus(const ToySpec& spec, const std::string& out_dir) {
  if (spec.languages.empty()) throw DataError("toy spec: no languages");
  if (spec.min_words < 1 || spec.max_words < spec.min_words ||
      spec.min_syms < 1 || spec.max_syms < spec.min_syms) {
    throw DataError("toy spec: bad word/symbol ranges");
  }
  // Disjoint inventories; global index fixes each symbol's tone.
  std::map<std::string, int> symbol_index;
  for (const ToyLanguage& lang : spec.languages) {
    if (lang.symbols.empty()) throw DataError("toy spec: empty inventory for " + lang.code);
    for (const std::string& s : lang.symbols) {
      int next = static_cast<int>(symbol_index.size());
      if (!symbol_index.emplace(s, next).second) {
        throw DataError("toy spec: inventories overlap on symbol '" + s + "'");
      }
    }
  }

  if (ToneHz(static_cast<int>(symbol_index.size()) - 1) >= spec.sample_rate / 2.0) {
    throw DataError("toy spec: inventory too large, tones would exceed Nyquist");
  }

  std::filesystem::create_directories(out_dir + "/wav");
  Rng root(spec.seed);
  ToyCorpus out;

  const int tone_n = static_cast<int>(std::lround(spec.tone_ms * spec.sample_rate / 1000.0));
  const int gap_n = static_cast<int>(std::lround(spec.gap_ms * spec.sample_rate / 1000.0));

  for (const ToyLanguage& lang : spec.languages) {
    Rng lrng = root.Fork(Fnv1a64(lang.code));
    // Fixed word list per language.
    std::set<std::string> word_set;
    std::vector<std::string> words;
    int guard = 0;
    while (static_cast<int>(words.size()) < lang.num_words) {
      if (++guard > lang.num_words * 1000) {
        throw DataError("toy spec: cannot build " + std::to_string(lang.num_words) +
                        " distinct words for " + lang.code);
      }
      int ns = lrng.UniformInt(spec.min_syms, spec.max_syms);
      std::string w;
      for (int i = 0; i < ns; ++i) {
        w += lang.symbols[static_cast<size_t>(lrng.NextBelow(lang.symbols.size()))];
      }
      if (word_set.insert(w).second) words.push_back(w);
    }

    auto make_split = [&](const char* split, int count, Manifest& manifest) {
      Rng srng = lrng.Fork(Fnv1a64(split));
      for (int u = 0; u < count; ++u) {
        int nw = srng.UniformInt(spec.min_words, spec.max_words);
        std::vector<std::string> utt_words;
        for (int i = 0; i < nw; ++i) {
          utt_words.push_back(words[static_cast<size_t>(srng.NextBelow(words.size()))]);
        }
        int spk = srng.UniformInt(0, spec.speakers_per_language - 1);
        double spk_gain = 0.22 + 0.04 * spk;  // mild per-speaker level differences

        audio::Waveform w;
        w.sample_rate = spec.sample_rate;
        char id[64];
        std::snprintf(id, sizeof(id), "%s-%s-%04d", lang.code.c_str(), split, u);
        w.utt_id = id;
        w.speaker_id = lang.code + "_spk" + std::to_string(spk);
        w.language = lang.code;
        w.samples.reserve(static_cast<size_t>(nw) * 3 * (tone_n + gap_n));
        for (size_t wi = 0; wi < utt_words.size(); ++wi) {
          if (wi > 0) w.samples.insert(w.samples.end(), gap_n, 0.0);
          for (char ch : utt_words[wi]) {
            AppendTone(w.samples, ToneHz(symbol_index.at(std::string(1, ch))), spk_gain,
                       tone_n, spec.sample_rate);
          }
        }
        if (spec.noise > 0.0) {
          for (double& x : w.samples) x += spec.noise * srng.Gaussian();
        }
        std::string wav_path = out_dir + "/wav/" + w.utt_id + ".wav";
        audio::WriteWav(wav_path, w);

        Record r;
        r.utt_id = w.utt_id;
        r.speaker_id = w.speaker_id;
        r.language = lang.code;
        r.audio_path = wav_path;
        std::string text;
        for (size_t wi = 0; wi < utt_words.size(); ++wi) {
          if (wi > 0) text += ' ';
          text += utt_words[wi];
        }
        r.transcript = text;
        manifest.records.push_back(std::move(r));
      }
    };
    make_split("train", lang.num_train, out.train);
    make_split("test", lang.num_test, out.test);
  }

  SaveManifest(out_dir + "/train.jsonl", out.train);
  SaveManifest(out_dir + "/test.jsonl", out.test);
  return out;
}

}  // namespace corpus
}  // namespace mlasr
