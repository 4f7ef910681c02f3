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

#ifndef MLASR_BPE_HPP_
#define MLASR_BPE_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace mlasr {
namespace bpe {

// Continuation marker carried by every non-final sub-word unit of a word.
inline constexpr const char* kMarker = "@@";

// Word-frequency statistics of a training corpus. Words are Unicode
// strings without whitespace; the ordered map keeps learning deterministic.
using WordCounts = std::map<std::string, int64_t>;

// Ordered merge rules plus the bookkeeping needed for inventory accounting.
//
// Merge pairs are identified by symbol text alone: the word-final status of
// an occurrence is tracked so units never cross word ends, but it does not
// split a pair into two identities. A merged symbol inherits the finality
// of its right constituent per occurrence.
struct MergeTable {
  std::vector<std::pair<std::string, std::string>> merges;
  // The merge budget (alpha) requested at learn time; merges.size() may be
  // smaller when learning stops early.
  int64_t num_merges = 0;
  // Distinct (character, word-final) symbols seen in the training corpus.
  // Zero for tables loaded from disk.
  int64_t initial_symbols = 0;

  // Initial symbols plus one new symbol per executed merge.
  int64_t InventorySize() const {
    return initial_symbols + static_cast<int64_t>(merges.size());
  }
};

// Sub-word units in order; within a word every unit except the last ends
// with the `@@` marker.
using SubwordSeq = std::vector<std::string>;

// Greedy merge learning: up to `alpha` iterations, each replacing every
// occurrence of the most frequent adjacent symbol pair with the
// concatenated symbol. Stops early when no pair occurs at least twice.
// Ties break on the lexicographically smallest (left, right) pair.
MergeTable LearnMerges(const WordCounts& counts, int64_t alpha);

// Splits `word` into Unicode scalar values and replays the learned merges
// in order. Characters unseen at training time pass through as singleton
// units.
SubwordSeq ApplyBpe(const std::string& word, const MergeTable& table);

// Whitespace-tokenizes `sentence` and applies BPE per word.
SubwordSeq EncodeText(const std::string& sentence, const MergeTable& table);

// Joins marked units back into words; exact inverse of EncodeText on
// well-formed sequences.
std::string DecodeUnits(const SubwordSeq& units);

// Merge file: `#bpe-v1 alpha=<n>` header, then one "left right" line per
// merge in learned order.
std::string SerializeMergeTable(const MergeTable& table);
MergeTable ParseMergeTable(const std::string& content);
void SaveMergeTable(const MergeTable& table, const std::string& path);
MergeTable LoadMergeTable(const std::string& path);

// Tallies whitespace-separated tokens of a raw text corpus.
WordCounts CountWords(const std::string& text);

}  // namespace bpe
}  // namespace mlasr

#endif  // MLASR_BPE_HPP_
