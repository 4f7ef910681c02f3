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

#ifndef MLASR_CORPUS_HPP_
#define MLASR_CORPUS_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace mlasr {
namespace corpus {

struct Record {
  std::string utt_id;
  std::string speaker_id;
  std::string language;
  std::string audio_path;   // exactly one of audio_path / feature_ref set
  std::string feature_ref;  // "<archive>#<utt_id>"
  std::string transcript;
};

struct Manifest {
  std::vector<Record> records;

  std::map<std::string, int64_t> CountsByLanguage() const;
  std::vector<std::string> Languages() const;  // sorted, unique
  const Record& Find(const std::string& utt_id) const;
};

// JSON-lines, one record per line. Errors carry the 1-based line number.
// allowed_langs, when given, restricts record languages.
Manifest LoadManifest(const std::string& path,
                      const std::vector<std::string>* allowed_langs = nullptr);
void SaveManifest(const std::string& path, const Manifest& m);

struct ToyLanguage {
  std::string code;
  std::vector<std::string> symbols;  // single characters, disjoint across languages
  int num_words = 24;
  int num_train = 200;
  int num_test = 40;
};

struct ToySpec {
  std::vector<ToyLanguage> languages;
  int sample_rate = 8000;
  int min_words = 3;
  int max_words = 5;
  int min_syms = 2;  // symbols per word
  int max_syms = 3;
  double tone_ms = 70.0;
  double gap_ms = 30.0;
  double noise = 0.003;
  int speakers_per_language = 4;
  uint64_t seed = 1;
};

struct ToyCorpus {
  Manifest train;
  Manifest test;
};

// Tone frequency of the i-th symbol across the union inventory. The ladder
// is geometric (ratio 1.2) so that speed perturbation, which rescales all
// frequencies, keeps every symbol on its own side of its neighbors.
double ToneHz(int global_symbol_index);

// Writes wav/<utt>.wav, train.jsonl, test.jsonl under out_dir.
// Deterministic under spec.seed.
ToyCorpus GenerateToyCorpus(const ToySpec& spec, const std::string& out_dir);

}  // namespace corpus
}  // namespace mlasr

#endif  // MLASR_CORPUS_HPP_
