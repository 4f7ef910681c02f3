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

#include "mlasr/bpe.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "mlasr/common.hpp"
#include "mlasr/utf8.hpp"

namespace mlasr {
namespace bpe {

namespace {

// Symbols may not contain whitespace, so a space joins a pair into a
// unique map key.
std::string PairKey(const std::string& left, const std::string& right) {
  std::string k;
  k.reserve(left.size() + right.size() + 1);
  k += left;
  k += ' ';
  k += right;
  return k;
}

void ValidateWord(const std::string& word) {
  if (word.empty()) throw DataError("empty corpus word");
  if (word.find(kMarker) != std::string::npos) {
    throw DataError("reserved marker in input: " + word);
  }
  for (unsigned char c : word) {
    if (std::isspace(c)) throw DataError("whitespace inside corpus word: " + word);
  }
}

// One occurrence-level merge pass: replaces adjacent (left, right) text
// matches left to right without overlap. Returns true if anything merged.
bool MergeInWord(std::vector<std::string>* symbols, const std::string& left,
                 const std::string& right) {
  bool changed = false;
  std::vector<std::string> out;
  out.reserve(symbols->size());
  size_t i = 0;
  while (i < symbols->size()) {
    if (i + 1 < symbols->size() && (*symbols)[i] == left && (*symbols)[i + 1] == right) {
      out.push_back(left + right);
      i += 2;
      changed = true;
    } else {
      out.push_back((*symbols)[i]);
      ++i;
    }
  }
  if (changed) *symbols = std::move(out);
  return changed;
}

struct LearnState {
  // Per distinct word: current symbol sequence and corpus count.
  std::vector<std::vector<std::string>> words;
  std::vector<int64_t> counts;
  // pair key -> total weighted count.
  std::unordered_map<std::string, int64_t> pair_counts;
  // pair key -> indices of words currently containing the pair.
  std::unordered_map<std::string, std::unordered_set<size_t>> pair_words;

  void AddWordPairs(size_t w, int64_t sign) {
    const auto& syms = words[w];
    const int64_t delta = sign * counts[w];
    for (size_t i = 0; i + 1 < syms.size(); ++i) {
      std::string key = PairKey(syms[i], syms[i + 1]);
      int64_t& c = pair_counts[key];
      c += delta;
      if (c <= 0) {
        pair_counts.erase(key);
        pair_words[key].erase(w);
        if (pair_words[key].empty()) pair_words.erase(key);
      } else if (sign > 0) {
        pair_words[key].insert(w);
      }
    }
  }
};

}  // namespace

MergeTable LearnMerges(const WordCounts& counts, int64_t alpha) {
  if (counts.empty()) throw DataError("empty corpus");
  if (alpha < 0) throw DataError("negative merge budget");

  LearnState st;
  std::set<std::pair<std::string, bool>> initial;
  for (const auto& [word, count] : counts) {
    ValidateWord(word);
    if (count < 1) throw DataError("non-positive count for word: " + word);
    std::vector<std::string> syms = SplitUtf8(word);
    for (size_t i = 0; i < syms.size(); ++i) {
      initial.insert({syms[i], i + 1 == syms.size()});
    }
    st.words.push_back(std::move(syms));
    st.counts.push_back(count);
  }
  for (size_t w = 0; w < st.words.size(); ++w) st.AddWordPairs(w, +1);

  MergeTable table;
  table.num_merges = alpha;
  table.initial_symbols = static_cast<int64_t>(initial.size());

  for (int64_t iter = 0; iter < alpha; ++iter) {
    // Best pair by (count desc, left asc, right asc); the scan order over
    // the hash map does not matter because the ordering is total.
    const std::string* best_key = nullptr;
    int64_t best_count = 0;
    for (const auto& [key, count] : st.pair_counts) {
      if (count > best_count || (count == best_count && best_key && key < *best_key)) {
        best_key = &key;
        best_count = count;
      }
    }
    if (best_count < 2) break;  // every remaining pair is a singleton

    size_t space = best_key->find(' ');
    std::string left = best_key->substr(0, space);
    std::string right = best_key->substr(space + 1);

    auto affected_it = st.pair_words.find(*best_key);
    std::vector<size_t> affected(affected_it->second.begin(), affected_it->second.end());
    std::sort(affected.begin(), affected.end());
    for (size_t w : affected) {
      st.AddWordPairs(w, -1);
      MergeInWord(&st.words[w], left, right);
      st.AddWordPairs(w, +1);
    }
    table.merges.emplace_back(std::move(left), std::move(right));
  }
  return table;
}

SubwordSeq ApplyBpe(const std::string& word, const MergeTable& table) {
  if (word.empty()) throw DataError("cannot encode empty word");
  for (unsigned char c : word) {
    if (std::isspace(c)) throw DataError("whitespace inside word: " + word);
  }
  std::vector<std::string> symbols = SplitUtf8(word);
  for (const auto& [left, right] : table.merges) {
    if (symbols.size() < 2) break;
    MergeInWord(&symbols, left, right);
  }
  SubwordSeq units;
  units.reserve(symbols.size());
  for (size_t i = 0; i < symbols.size(); ++i) {
    if (i + 1 < symbols.size()) {
      units.push_back(symbols[i] + kMarker);
    } else {
      units.push_back(symbols[i]);
    }
  }
  return units;
}

SubwordSeq EncodeText(const std::string& sentence, const MergeTable& table) {
  SubwordSeq out;
  for (const std::string& word : SplitWhitespace(sentence)) {
    SubwordSeq units = ApplyBpe(word, table);
    out.insert(out.end(), units.begin(), units.end());
  }
  return out;
}

std::string DecodeUnits(const SubwordSeq& units) {
  std::string out;
  bool continuing = false;
  for (size_t i = 0; i < units.size(); ++i) {
    const std::string& u = units[i];
    bool marked = u.size() >= 2 && u.compare(u.size() - 2, 2, kMarker) == 0;
    if (marked && i + 1 == units.size()) {
      throw DataError("dangling continuation");
    }
    if (!continuing && !out.empty()) out += ' ';
    out.append(u, 0, marked ? u.size() - 2 : u.size());
    continuing = marked;
  }
  return out;
}

std::string SerializeMergeTable(const MergeTable& table) {
  std::ostringstream out;
  out << "#bpe-v1 alpha=" << table.num_merges << "\n";
  for (const auto& [left, right] : table.merges) {
    out << left << ' ' << right << "\n";
  }
  return out.str();
}

MergeTable ParseMergeTable(const std::string& content) {
  std::istringstream in(content);
  std::string line;
  if (!std::getline(in, line) || line.rfind("#bpe-v1 alpha=", 0) != 0) {
    throw DataError("merge file missing #bpe-v1 header");
  }
  MergeTable table;
  try {
    table.num_merges = std::stoll(line.substr(14));
  } catch (const std::exception&) {
    throw DataError("malformed alpha in merge file header: " + line);
  }
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> fields = SplitWhitespace(line);
    if (fields.size() != 2) {
      throw DataError("merge file line " + std::to_string(lineno) + ": expected 'left right'");
    }
    table.merges.emplace_back(fields[0], fields[1]);
  }
  if (static_cast<int64_t>(table.merges.size()) > table.num_merges) {
    throw DataError("merge file has more merges than its alpha header");
  }
  return table;
}

void SaveMergeTable(const MergeTable& table, const std::string& path) {
  WriteFileOrThrow(path, SerializeMergeTable(table));
}

MergeTable LoadMergeTable(const std::string& path) {
  return ParseMergeTable(ReadFileOrThrow(path));
}

WordCounts CountWords(const std::string& text) {
  WordCounts counts;
  for (const std::string& w : SplitWhitespace(text)) counts[w] += 1;
  return counts;
}

}  // namespace bpe
}  // namespace mlasr
