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

#include "mlasr/lexicon.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "mlasr/common.hpp"

namespace mlasr {
namespace lex {

Scheme ParseScheme(const std::string& name) {
  if (name == "plain") return Scheme::kPlain;
  if (name == "b") return Scheme::kB;
  if (name == "e") return Scheme::kE;
  if (name == "b2") return Scheme::kB2;
  throw DataError("unknown scheme: " + name + " (expected plain|b|e|b2)");
}

std::string SchemeName(Scheme s) {
  switch (s) {
    case Scheme::kPlain: return "plain";
    case Scheme::kB: return "b";
    case Scheme::kE: return "e";
    case Scheme::kB2: return "b2";
  }
  throw DataError("invalid scheme value");
}

SymbolVocab SymbolVocab::Build(const std::vector<std::string>& corpus_units,
                               const std::vector<std::string>& languages, Scheme scheme) {
  if (corpus_units.empty()) throw DataError("cannot build vocabulary from empty unit set");

  std::vector<std::string> langs = languages;
  std::sort(langs.begin(), langs.end());
  if (std::adjacent_find(langs.begin(), langs.end()) != langs.end()) {
    throw DataError("duplicate language codes");
  }

  SymbolVocab v;
  v.scheme_ = scheme;
  v.tokens_ = {kPadToken, kUnkToken, kBosToken, kEosToken};
  if (scheme != Scheme::kPlain) {
    v.languages_ = langs;
    for (const std::string& code : langs) v.tokens_.push_back(LangToken(code));
  }

  std::set<std::string> reserved(v.tokens_.begin(), v.tokens_.end());
  std::set<std::string> units(corpus_units.begin(), corpus_units.end());
  for (const std::string& u : units) {
    if (u.empty()) throw DataError("empty sub-word unit");
    if (reserved.count(u)) throw DataError("sub-word collides with a reserved token: " + u);
    v.tokens_.push_back(u);
  }
  v.Index();
  return v;
}

void SymbolVocab::Index() {
  ids_.clear();
  lang_symbol_ids_.clear();
  for (int i = 0; i < static_cast<int>(tokens_.size()); ++i) {
    if (!ids_.emplace(tokens_[i], i).second) {
      throw DataError("duplicate token in vocabulary: " + tokens_[i]);
    }
  }
  for (const std::string& code : languages_) {
    lang_symbol_ids_[code] = ids_.at(LangToken(code));
  }
}

const std::string& SymbolVocab::TokenOf(int id) const {
  if (id < 0 || id >= Size()) throw DataError("token id out of range: " + std::to_string(id));
  return tokens_[id];
}

int SymbolVocab::IdOrUnk(const std::string& token) const {
  auto it = ids_.find(token);
  return it == ids_.end() ? kUnkId : it->second;
}

std::optional<int> SymbolVocab::TryId(const std::string& token) const {
  auto it = ids_.find(token);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

bool SymbolVocab::IsLangSymbolId(int id) const {
  int lang_base = 4;
  return id >= lang_base && id < lang_base + static_cast<int>(languages_.size());
}

std::optional<std::string> SymbolVocab::LangCodeOf(int id) const {
  if (!IsLangSymbolId(id)) return std::nullopt;
  return languages_[id - 4];
}

int SymbolVocab::LangSymbolId(const std::string& code) const {
  auto it = lang_symbol_ids_.find(code);
  if (it == lang_symbol_ids_.end()) throw DataError("unknown language: " + code);
  return it->second;
}

VocabAccounting SymbolVocab::Accounting() const {
  VocabAccounting a;
  a.specials = 4;
  a.lang_symbols = static_cast<int64_t>(languages_.size());
  a.subwords = Size() - a.specials - a.lang_symbols;
  return a;
}

std::string SymbolVocab::Serialize() const {
  std::ostringstream out;
  out << "#vocab-v1 scheme=" << SchemeName(scheme_) << " langs=";
  for (size_t i = 0; i < languages_.size(); ++i) {
    if (i) out << ',';
    out << languages_[i];
  }
  out << "\n";
  for (const std::string& t : tokens_) out << t << "\n";
  return out.str();
}

SymbolVocab SymbolVocab::Parse(const std::string& content) {
  std::istringstream in(content);
  std::string line;
  if (!std::getline(in, line) || line.rfind("#vocab-v1 ", 0) != 0) {
    throw DataError("vocab file missing #vocab-v1 header");
  }
  std::vector<std::string> fields = SplitWhitespace(line);
  SymbolVocab v;
  bool have_scheme = false;
  for (const std::string& f : fields) {
    if (f.rfind("scheme=", 0) == 0) {
      v.scheme_ = ParseScheme(f.substr(7));
      have_scheme = true;
    } else if (f.rfind("langs=", 0) == 0) {
      std::string csv = f.substr(6);
      if (!csv.empty()) {
        for (const std::string& code : SplitChar(csv, ',')) {
          if (code.empty()) throw DataError("empty language code in vocab header");
          v.languages_.push_back(code);
        }
      }
    }
  }
  if (!have_scheme) throw DataError("vocab header missing scheme=");
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    v.tokens_.push_back(line);
  }
  if (v.tokens_.size() < 4 || v.tokens_[0] != kPadToken || v.tokens_[1] != kUnkToken ||
      v.tokens_[2] != kBosToken || v.tokens_[3] != kEosToken) {
    throw DataError("vocab file does not start with the four reserved specials");
  }
  v.Index();
  return v;
}

void SymbolVocab::Save(const std::string& path) const { WriteFileOrThrow(path, Serialize()); }

SymbolVocab SymbolVocab::Load(const std::string& path) {
  return Parse(ReadFileOrThrow(path));
}

uint64_t SymbolVocab::Hash() const { return Fnv1a64(Serialize()); }

TaggedSequence TagSequence(const bpe::SubwordSeq& units, const std::string& language,
                           Scheme scheme, const SymbolVocab& vocab) {
  int lang_id = -1;
  if (scheme != Scheme::kPlain) {
    lang_id = vocab.LangSymbolId(language);  // throws on unknown language
  }
  TaggedSequence seq;
  seq.ids.reserve(units.size() + 3);
  switch (scheme) {
    case Scheme::kPlain:
      seq.ids.push_back(SymbolVocab::kBosId);
      break;
    case Scheme::kB:
      seq.ids.push_back(SymbolVocab::kBosId);
      seq.ids.push_back(lang_id);
      break;
    case Scheme::kE:
      seq.ids.push_back(SymbolVocab::kBosId);
      break;
    case Scheme::kB2:
      seq.ids.push_back(lang_id);
      break;
  }
  for (const std::string& u : units) seq.ids.push_back(vocab.IdOrUnk(u));
  if (scheme == Scheme::kE) seq.ids.push_back(lang_id);
  seq.ids.push_back(SymbolVocab::kEosId);
  if (scheme != Scheme::kPlain) seq.language = language;
  return seq;
}

StrippedSequence StripTags(const std::vector<int>& ids, Scheme /*scheme*/,
                           const SymbolVocab& vocab) {
  StrippedSequence out;
  for (int id : ids) {
    if (id == SymbolVocab::kPadId || id == SymbolVocab::kBosId || id == SymbolVocab::kEosId) {
      continue;
    }
    if (auto code = vocab.LangCodeOf(id)) {
      if (!out.predicted_language) out.predicted_language = *code;
      continue;
    }
    out.units.push_back(vocab.TokenOf(id));
  }
  return out;
}

}  // namespace lex
}  // namespace mlasr
