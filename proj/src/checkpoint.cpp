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

#include "mlasr/checkpoint.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstring>

#include "mlasr/common.hpp"

namespace mlasr {
namespace ckpt {

namespace {

constexpr char kMagic[9] = "MLASRCK1";
constexpr uint32_t kVersion = 1;

void PutU32(std::string& b, uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void PutU64(std::string& b, uint64_t v) {
  for (int i = 0; i < 8; ++i) b.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void PutI32(std::string& b, int32_t v) { PutU32(b, static_cast<uint32_t>(v)); }
void PutF32(std::string& b, float v) {
  uint32_t u;
  std::memcpy(&u, &v, 4);
  PutU32(b, u);
}
void PutF64(std::string& b, double v) {
  uint64_t u;
  std::memcpy(&u, &v, 8);
  PutU64(b, u);
}

struct Reader {
  const std::string& b;
  size_t at = 0;
  const std::string& path;

  void Need(size_t n) const {
    if (at + n > b.size()) throw DataError("truncated checkpoint: " + path);
  }
  uint32_t U32() {
    Need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(static_cast<uint8_t>(b[at + i])) << (8 * i);
    at += 4;
    return v;
  }
  uint64_t U64() {
    Need(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(static_cast<uint8_t>(b[at + i])) << (8 * i);
    at += 8;
    return v;
  }
  int32_t I32() { return static_cast<int32_t>(U32()); }
  float F32() {
    uint32_t u = U32();
    float f;
    std::memcpy(&f, &u, 4);
    return f;
  }
  double F64() {
    uint64_t u = U64();
    double f;
    std::memcpy(&f, &u, 8);
    return f;
  }
  std::string Str(size_t n) {
    Need(n);
    std::string s = b.substr(at, n);
    at += n;
    return s;
  }
};

}  // namespace

void SaveCheckpoint(const std::string& path, const model::ModelParams& p,
                    uint64_t vocab_hash) {
  if (!p.AllFinite()) throw NumericError("refusing to save non-finite parameters");
  std::string b;
  b.append(kMagic, 8);
  PutU32(b, kVersion);
  const model::ModelConfig& c = p.cfg;
  PutI32(b, c.n_layers);
  PutI32(b, c.d_model);
  PutI32(b, c.n_heads);
  PutI32(b, c.d_k);
  PutI32(b, c.d_v);
  PutI32(b, c.d_ff);
  PutI32(b, c.vocab_size);
  PutI32(b, c.feat_dim);
  PutF64(b, c.dropout);
  PutU64(b, vocab_hash);
  PutU32(b, static_cast<uint32_t>(p.tensors.size()));
  for (const auto& [name, t] : p.tensors) {  // std::map: sorted, stable order
    PutU32(b, static_cast<uint32_t>(name.size()));
    b += name;
    PutU32(b, static_cast<uint32_t>(t.rows));
    PutU32(b, static_cast<uint32_t>(t.cols));
    PutU32(b, 0);  // dtype f32
    for (double x : t.data) PutF32(b, static_cast<float>(x));
  }
  WriteFileOrThrow(path, b);
}

LoadedCheckpoint LoadCheckpoint(const std::string& path) {
  std::string bytes = ReadFileOrThrow(path);
  Reader r{bytes, 0, path};
  if (r.Str(8) != std::string(kMagic, 8)) throw DataError("bad checkpoint magic: " + path);
  uint32_t version = r.U32();
  if (version != kVersion) {
    throw DataError("unsupported checkpoint version " + std::to_string(version) + ": " + path);
  }
  LoadedCheckpoint out;
  model::ModelConfig& c = out.params.cfg;
  c.n_layers = r.I32();
  c.d_model = r.I32();
  c.n_heads = r.I32();
  c.d_k = r.I32();
  c.d_v = r.I32();
  c.d_ff = r.I32();
  c.vocab_size = r.I32();
  c.feat_dim = r.I32();
  c.dropout = r.F64();
  out.vocab_hash = r.U64();
  uint32_t num_tensors = r.U32();
  for (uint32_t i = 0; i < num_tensors; ++i) {
    uint32_t name_len = r.U32();
    std::string name = r.Str(name_len);
    uint32_t rows = r.U32();
    uint32_t cols = r.U32();
    uint32_t dtype = r.U32();
    if (dtype != 0) throw DataError("unsupported tensor dtype in " + path);
    nn::Tensor t(static_cast<int>(rows), static_cast<int>(cols));
    for (size_t k = 0; k < t.data.size(); ++k) t.data[k] = r.F32();
    if (out.params.tensors.count(name) != 0) {
      throw DataError("duplicate tensor '" + name + "' in " + path);
    }
    out.params.tensors[name] = std::move(t);
  }
  if (r.at != bytes.size()) throw DataError("trailing bytes in checkpoint: " + path);
  if (!out.params.AllFinite()) throw NumericError("non-finite values in checkpoint: " + path);
  return out;
}

std::string CheckpointName(const std::string& dir, int64_t step) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "ckpt-%08" PRId64 ".ckpt", step);
  return dir + "/" + buf;
}

}  // namespace ckpt
}  // namespace mlasr
