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

#include "mlasr/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "mlasr/common.hpp"

namespace mlasr {
namespace audio {

namespace {

uint32_t ReadU32(const std::string& b, size_t at) {
  return static_cast<uint32_t>(static_cast<uint8_t>(b[at])) |
         static_cast<uint32_t>(static_cast<uint8_t>(b[at + 1])) << 8 |
         static_cast<uint32_t>(static_cast<uint8_t>(b[at + 2])) << 16 |
         static_cast<uint32_t>(static_cast<uint8_t>(b[at + 3])) << 24;
}

uint16_t ReadU16(const std::string& b, size_t at) {
  return static_cast<uint16_t>(static_cast<uint8_t>(b[at]) |
                               static_cast<uint8_t>(b[at + 1]) << 8);
}

void PutU32(std::string& b, uint32_t v) {
  b.push_back(static_cast<char>(v & 0xff));
  b.push_back(static_cast<char>((v >> 8) & 0xff));
  b.push_back(static_cast<char>((v >> 16) & 0xff));
  b.push_back(static_cast<char>((v >> 24) & 0xff));
}

void PutU16(std::string& b, uint16_t v) {
  b.push_back(static_cast<char>(v & 0xff));
  b.push_back(static_cast<char>((v >> 8) & 0xff));
}

}  // namespace

Waveform ReadWav(const std::string& path) {
  std::string bytes = ReadFileOrThrow(path);
  if (bytes.size() < 44 || bytes.compare(0, 4, "RIFF") != 0 ||
      bytes.compare(8, 4, "WAVE") != 0) {
    throw DataError("not a RIFF/WAVE file: " + path);
  }
  Waveform w;
  bool have_fmt = false, have_data = false;
  size_t at = 12;
  while (at + 8 <= bytes.size()) {
    std::string id = bytes.substr(at, 4);
    uint32_t size = ReadU32(bytes, at + 4);
    size_t body = at + 8;
    if (body + size > bytes.size()) {
      throw DataError("truncated chunk '" + id + "' in " + path);
    }
    if (id == "fmt ") {
      if (size < 16) throw DataError("short fmt chunk in " + path);
      uint16_t format = ReadU16(bytes, body);
      uint16_t channels = ReadU16(bytes, body + 2);
      uint32_t rate = ReadU32(bytes, body + 4);
      uint16_t bits = ReadU16(bytes, body + 14);
      if (format != 1 || bits != 16) {
        throw DataError("only PCM16 supported: " + path);
      }
      if (channels != 1) throw DataError("only mono supported: " + path);
      w.sample_rate = static_cast<int>(rate);
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw DataError("data chunk before fmt in " + path);
      size_t n = size / 2;
      w.samples.resize(n);
      for (size_t i = 0; i < n; ++i) {
        int16_t v = static_cast<int16_t>(ReadU16(bytes, body + 2 * i));
        w.samples[i] = v / 32768.0;
      }
      have_data = true;
    }
    at = body + size + (size & 1);  // chunks are word-aligned
  }
  if (!have_fmt || !have_data) throw DataError("missing fmt/data chunk in " + path);
  if (w.samples.empty()) throw DataError("empty audio: " + path);
  return w;
}

void WriteWav(const std::string& path, const Waveform& w) {
  if (w.sample_rate <= 0) throw DataError("invalid sample rate for " + path);
  std::string b;
  b.reserve(44 + w.samples.size() * 2);
  uint32_t data_size = static_cast<uint32_t>(w.samples.size() * 2);
  b += "RIFF";
  PutU32(b, 36 + data_size);
  b += "WAVEfmt ";
  PutU32(b, 16);
  PutU16(b, 1);  // PCM
  PutU16(b, 1);  // mono
  PutU32(b, static_cast<uint32_t>(w.sample_rate));
  PutU32(b, static_cast<uint32_t>(w.sample_rate) * 2);  // byte rate
  PutU16(b, 2);                                         // block align
  PutU16(b, 16);                                        // bits
  b += "data";
  PutU32(b, data_size);
  for (double x : w.samples) {
    long v = std::lrint(x * 32768.0);
    v = std::clamp(v, -32768L, 32767L);
    PutU16(b, static_cast<uint16_t>(static_cast<int16_t>(v)));
  }
  WriteFileOrThrow(path, b);
}

}  // namespace audio
}  // namespace mlasr
