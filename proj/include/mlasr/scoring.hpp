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

#ifndef MLASR_SCORING_HPP_
#define MLASR_SCORING_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace mlasr {
namespace score {

struct EditCounts {
  int64_t sub = 0;
  int64_t ins = 0;
  int64_t del = 0;
  int64_t ref_len = 0;

  int64_t Errors() const { return sub + ins + del; }
};

// Levenshtein with unit costs. Ties at minimal cost prefer substitutions
// over insertion+deletion pairs, which makes swapping ref/hyp exchange
// ins and del exactly.
EditCounts EditDistance(const std::vector<std::string>& ref,
                        const std::vector<std::string>& hyp);

enum class Unit { kWord, kChar };

Unit ParseUnit(const std::string& s);  // "word" | "char"
std::string UnitName(Unit u);

// Word unit: whitespace tokens. Char unit: whitespace removed, then one
// token per Unicode scalar.
std::vector<std::string> Tokenize(const std::string& text, Unit unit);

struct Utterance {
  std::string utt_id;
  std::string language;
  std::string ref;
  std::string hyp;
};

struct LanguageScore {
  EditCounts counts;
  double error_rate = 0.0;  // (S+I+D)/ref_len
  int64_t num_utts = 0;
  Unit unit = Unit::kWord;
};

struct ScoreReport {
  std::map<std::string, LanguageScore> per_language;
  double macro_average = 0.0;  // unweighted mean over languages
  double micro_average = 0.0;  // pooled counts over all utterances
};

// Languages missing from unit_by_lang are scored with default_unit.
ScoreReport ScoreCorpus(const std::vector<Utterance>& utts,
                        const std::map<std::string, Unit>& unit_by_lang,
                        Unit default_unit = Unit::kWord);

// The WER/CER convention: character unit for Mandarin and Japanese.
std::map<std::string, Unit> DefaultUnits();

}  // namespace score
}  // namespace mlasr

#endif  // MLASR_SCORING_HPP_
