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

#include "mlasr/scoring.hpp"

#include <algorithm>
#include <cctype>

#include "mlasr/common.hpp"
#include "mlasr/utf8.hpp"

namespace mlasr {
namespace score {

EditCounts EditDistance(const std::vector<std::string>& ref,
                        const std::vector<std::string>& hyp) {
  const size_t n = ref.size(), m = hyp.size();
  // Cell = (cost, substitutions); minimize cost, then maximize subs. Both
  // objectives are additive along an alignment path, so the lexicographic
  // optimum has optimal substructure and plain DP applies.
  struct Cell {
    int64_t cost;
    int64_t subs;
  };
  auto better = [](const Cell& a, const Cell& b) {
    if (a.cost != b.cost) return a.cost < b.cost;
    return a.subs > b.subs;
  };
  std::vector<Cell> prev(m + 1), cur(m + 1);
  for (size_t j = 0; j <= m; ++j) prev[j] = {static_cast<int64_t>(j), 0};
  for (size_t i = 1; i <= n; ++i) {
    cur[0] = {static_cast<int64_t>(i), 0};
    for (size_t j = 1; j <= m; ++j) {
      Cell best;
      if (ref[i - 1] == hyp[j - 1]) {
        best = prev[j - 1];  // match
      } else {
        best = {prev[j - 1].cost + 1, prev[j - 1].subs + 1};  // substitution
      }
      Cell del{prev[j].cost + 1, prev[j].subs};
      Cell ins{cur[j - 1].cost + 1, cur[j - 1].subs};
      if (better(del, best)) best = del;
      if (better(ins, best)) best = ins;
      cur[j] = best;
    }
    std::swap(prev, cur);
  }
  const int64_t cost = prev[m].cost;
  const int64_t subs = prev[m].subs;
  // With S fixed, I and D follow from the lengths:
  //   S + I + D = cost and I - D = |hyp| - |ref|.
  EditCounts c;
  c.sub = subs;
  c.ins = (cost - subs + static_cast<int64_t>(m) - static_cast<int64_t>(n)) / 2;
  c.del = (cost - subs - static_cast<int64_t>(m) + static_cast<int64_t>(n)) / 2;
  c.ref_len = static_cast<int64_t>(n);
  return c;
}

Unit ParseUnit(const std::string& s) {
  if (s == "word") return Unit::kWord;
  if (s == "char") return Unit::kChar;
  throw DataError("unknown scoring unit '" + s + "' (want word|char)");
}

std::string UnitName(Unit u) { return u == Unit::kWord ? "word" : "char"; }

std::vector<std::string> Tokenize(const std::string& text, Unit unit) {
  if (unit == Unit::kWord) return SplitWhitespace(text);
  std::string compact;
  compact.reserve(text.size());
  for (char ch : text) {
    if (!std::isspace(static_cast<unsigned char>(ch))) compact += ch;
  }
  return SplitUtf8(compact);
}

ScoreReport ScoreCorpus(const std::vector<Utterance>& utts,
                        const std::map<std::string, Unit>& unit_by_lang,
                        Unit default_unit) {
  if (utts.empty()) throw DataError("score: no utterances");
  ScoreReport report;
  for (const Utterance& u : utts) {
    if (u.language.empty()) throw DataError("score: utterance without language: " + u.utt_id);
    auto uit = unit_by_lang.find(u.language);
    Unit unit = uit != unit_by_lang.end() ? uit->second : default_unit;
    LanguageScore& ls = report.per_language[u.language];
    ls.unit = unit;
    EditCounts ec = EditDistance(Tokenize(u.ref, unit), Tokenize(u.hyp, unit));
    ls.counts.sub += ec.sub;
    ls.counts.ins += ec.ins;
    ls.counts.del += ec.del;
    ls.counts.ref_len += ec.ref_len;
    ++ls.num_utts;
  }
  double macro_sum = 0.0;
  int64_t pooled_errors = 0, pooled_ref = 0;
  for (auto& [lang, ls] : report.per_language) {
    if (ls.counts.ref_len == 0) {
      throw DataError("score: empty reference corpus for language " + lang);
    }
    ls.error_rate = static_cast<double>(ls.counts.Errors()) /
                    static_cast<double>(ls.counts.ref_len);
    macro_sum += ls.error_rate;
    pooled_errors += ls.counts.Errors();
    pooled_ref += ls.counts.ref_len;
  }
  report.macro_average = macro_sum / static_cast<double>(report.per_language.size());
  report.micro_average =
      static_cast<double>(pooled_errors) / static_cast<double>(pooled_ref);
  return report;
}

std::map<std::string, Unit> DefaultUnits() {
  return {{"MA", Unit::kChar}, {"JA", Unit::kChar}};
}

}  // namespace score
}  // namespace mlasr
