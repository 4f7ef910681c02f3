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

#ifndef MLASR_LEXICON_HPP_
#define MLASR_LEXICON_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "mlasr/bpe.hpp"

namespace mlasr {
namespace lex {

// How the language symbol is woven into a target sequence.
//   kPlain: <S> u... <\S>
//   kB:     <S> <S_Lang> u... <\S>      (language known at train time)
//   kE:     <S> u... <S_Lang> <\S>      (language known at train time)
//   kB2:    <S_Lang> u... <\S>          (language known at decode time too)
enum class Scheme { kPlain, kB, kE, kB2 };

Scheme ParseScheme(const std::string& name);
std::string SchemeName(Scheme s);

struct VocabAccounting {
  int64_t subwords = 0;
  int64_t specials = 0;
  int64_t lang_symbols = 0;
  // Sub-words plus specials; the language increment is reported separately
  // so either accounting of the vocabulary size can be read off.
  int64_t total_without_lang() const { return subwords + specials; }
  int64_t total() const { return subwords + specials + lang_symbols; }
};

// Immutable bidirectional token<->id map. Ids are dense; specials occupy
// 0..3 (PAD, UNK, <S>, <\S>), then language symbols in sorted code order
// (absent for kPlain), then sub-words sorted.
class SymbolVocab {
 public:
  static constexpr int kPadId = 0;
  static constexpr int kUnkId = 1;
  static constexpr int kBosId = 2;
  static constexpr int kEosId = 3;
  static constexpr const char* kPadToken = "<PAD>";
  static constexpr const char* kUnkToken = "<UNK>";
  static constexpr const char* kBosToken = "<S>";
  static constexpr const char* kEosToken = "<\\S>";

  static std::string LangToken(const std::string& code) { return "<S_" + code + ">"; }

  // `corpus_units` is a multiset of sub-word strings (duplicates fine).
  static SymbolVocab Build(const std::vector<std::string>& corpus_units,
                           const std::vector<std::string>& languages, Scheme scheme);

  int Size() const { return static_cast<int>(tokens_.size()); }
  const std::string& TokenOf(int id) const;
  // Returns the id, or kUnkId for tokens outside the vocabulary.
  int IdOrUnk(const std::string& token) const;
  std::optional<int> TryId(const std::string& token) const;

  bool IsLangSymbolId(int id) const;
  // Language code of a language-symbol id, empty otherwise.
  std::optional<std::string> LangCodeOf(int id) const;
  int LangSymbolId(const std::string& code) const;  // throws on unknown code

  const std::vector<std::string>& Languages() const { return languages_; }
  Scheme GetScheme() const { return scheme_; }
  VocabAccounting Accounting() const;

  std::string Serialize() const;
  static SymbolVocab Parse(const std::string& content);
  void Save(const std::string& path) const;
  static SymbolVocab Load(const std::string& path);
  // Fingerprint of the serialized vocabulary; stored in checkpoints.
  uint64_t Hash() const;

 private:
  SymbolVocab() = default;
  void Index();

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> ids_;
  std::vector<std::string> languages_;
  std::unordered_map<std::string, int> lang_symbol_ids_;  // code -> id
  Scheme scheme_ = Scheme::kPlain;
};

struct TaggedSequence {
  std::vector<int> ids;
  std::optional<std::string> language;
};

// Frames `units` with start/end tokens and the scheme's language symbol.
// Unknown sub-words map to UNK; an unknown language code is an error.
TaggedSequence TagSequence(const bpe::SubwordSeq& units, const std::string& language,
                           Scheme scheme, const SymbolVocab& vocab);

struct StrippedSequence {
  bpe::SubwordSeq units;
  std::optional<std::string> predicted_language;
};

// Removes framing and language symbols, best effort over arbitrary model
// output: language symbols anywhere are dropped and the first one seen is
// reported.
StrippedSequence StripTags(const std::vector<int>& ids, Scheme scheme,
                           const SymbolVocab& vocab);

}  // namespace lex
}  // namespace mlasr

#endif  // MLASR_LEXICON_HPP_
