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

#ifndef MLASR_WAV_HPP_
#define MLASR_WAV_HPP_

#include <string>
#include <vector>

namespace mlasr {
namespace audio {

struct Waveform {
  std::vector<double> samples;  // in [-1, 1)
  int sample_rate = 0;
  std::string utt_id;
  std::string speaker_id;
  std::string language;
};

// PCM16 mono RIFF only.
Waveform ReadWav(const std::string& path);
void WriteWav(const std::string& path, const Waveform& w);

}  // namespace audio
}  // namespace mlasr

#endif  // MLASR_WAV_HPP_
