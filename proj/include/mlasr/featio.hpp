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

#ifndef MLASR_FEATIO_HPP_
#define MLASR_FEATIO_HPP_

#include <fstream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mlasr/frontend.hpp"

namespace mlasr {
namespace featio {

// Archive layout: 8-byte magic "MLFA0001", then per utterance:
//   u32 name_len, name bytes, u32 T, u32 D, f32 frame_shift_ms,
//   T*D float32 row-major, all little-endian.
extern const char kMagic[9];

class ArchiveWriter {
 public:
  explicit ArchiveWriter(const std::string& path);
  ~ArchiveWriter();

  void Add(const std::string& utt_id, const frontend::FeatureMatrix& f);
  void Close();

 private:
  std::ofstream out_;
  std::string path_;
  bool closed_ = false;
};

struct Archive {
  std::vector<std::pair<std::string, frontend::FeatureMatrix>> utts;
  std::map<std::string, size_t> index;

  const frontend::FeatureMatrix& Get(const std::string& utt_id) const;
};

Archive ReadArchive(const std::string& path);

// "path#utt_id" -> (path, utt_id).
std::pair<std::string, std::string> ParseFeatureRef(const std::string& ref);

}  // namespace featio
}  // namespace mlasr

#endif  // MLASR_FEATIO_HPP_
