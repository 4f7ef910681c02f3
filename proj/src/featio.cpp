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

#include "mlasr/featio.hpp"

#include <cstdint>
#include <cstring>

#include "mlasr/common.hpp"

namespace mlasr {
namespace featio {

const char kMagic[9] = "MLFA0001";

namespace {

void PutU32(std::ofstream& out, uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

void PutF32(std::ofstream& out, float v) {
  uint32_t u;
  std::memcpy(&u, &v, 4);
  PutU32(out, u);
}

uint32_t TakeU32(const std::string& b, size_t& at, const std::string& path) {
  if (at + 4 > b.size()) throw DataError("truncated feature archive: " + path);
  uint32_t v = static_cast<uint32_t>(static_cast<uint8_t>(b[at])) |
               static_cast<uint32_t>(static_cast<uint8_t>(b[at + 1])) << 8 |
               static_cast<uint32_t>(static_cast<uint8_t>(b[at + 2])) << 16 |
               static_cast<uint32_t>(static_cast<uint8_t>(b[at + 3])) << 24;
  at += 4;
  return v;
}

float TakeF32(const std::string& b, size_t& at, const std::string& path) {
  uint32_t u = TakeU32(b, at, path);
  float f;
  std::memcpy(&f, &u, 4);
  return f;
}

}  // namespace

ArchiveWriter::ArchiveWriter(const std::string& path) : path_(path) {
  out_.open(path, std::ios::binary | std::ios::trunc);
  if (!out_) throw DataError("cannot open for writing: " + path);
  out_.write(kMagic, 8);
}

ArchiveWriter::~ArchiveWriter() {
  if (!closed_) {
    out_.flush();
  }
}

void ArchiveWriter::Add(const std::string& utt_id, const frontend::FeatureMatrix& f) {
  if (closed_) throw DataError("archive already closed: " + path_);
  PutU32(out_, static_cast<uint32_t>(utt_id.size()));
  out_.write(utt_id.data(), static_cast<std::streamsize>(utt_id.size()));
  PutU32(out_, static_cast<uint32_t>(f.frames));
  PutU32(out_, static_cast<uint32_t>(f.dim));
  PutF32(out_, static_cast<float>(f.frame_shift_ms));
  for (double x : f.data) PutF32(out_, static_cast<float>(x));
  if (!out_) throw DataError("write failed: " + path_);
}

void ArchiveWriter::Close() {
  if (closed_) return;
  out_.close();
  closed_ = true;
  if (out_.fail()) throw DataError("close failed: " + path_);
}

const frontend::FeatureMatrix& Archive::Get(const std::string& utt_id) const {
  auto it = index.find(utt_id);
  if (it == index.end()) throw DataError("utterance not in archive: " + utt_id);
  return utts[it->second].second;
}

Archive ReadArchive(const std::string& path) {
  std::string bytes = ReadFileOrThrow(path);
  if (bytes.size() < 8 || bytes.compare(0, 8, kMagic) != 0) {
    throw DataError("bad feature archive magic: " + path);
  }
  Archive a;
  size_t at = 8;
  while (at < bytes.size()) {
    uint32_t name_len = TakeU32(bytes, at, path);
    if (at + name_len > bytes.size()) throw DataError("truncated feature archive: " + path);
    std::string name = bytes.substr(at, name_len);
    at += name_len;
    uint32_t t = TakeU32(bytes, at, path);
    uint32_t d = TakeU32(bytes, at, path);
    float shift = TakeF32(bytes, at, path);
    frontend::FeatureMatrix f(static_cast<int>(t), static_cast<int>(d));
    f.frame_shift_ms = shift;
    for (size_t i = 0; i < f.data.size(); ++i) f.data[i] = TakeF32(bytes, at, path);
    if (a.index.count(name) != 0) throw DataError("duplicate utterance in archive: " + name);
    a.index[name] = a.utts.size();
    a.utts.emplace_back(std::move(name), std::move(f));
  }
  return a;
}

std::pair<std::string, std::string> ParseFeatureRef(const std::string& ref) {
  size_t hash = ref.rfind('#');
  if (hash == std::string::npos || hash == 0 || hash + 1 == ref.size()) {
    throw DataError("feature_ref must look like <archive>#<utt_id>: " + ref);
  }
  return {ref.substr(0, hash), ref.substr(hash + 1)};
}

}  // namespace featio
}  // namespace mlasr
