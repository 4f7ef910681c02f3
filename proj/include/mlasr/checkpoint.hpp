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

#ifndef MLASR_CHECKPOINT_HPP_
#define MLASR_CHECKPOINT_HPP_

#include <cstdint>
#include <string>

#include "mlasr/model.hpp"

namespace mlasr {
namespace ckpt {

// Binary container, little-endian throughout:
//   magic "MLASRCK1", u32 version,
//   i32 n_layers,d_model,n_heads,d_k,d_v,d_ff,vocab_size,feat_dim, f64 dropout,
//   u64 vocab_hash, u32 num_tensors,
//   per tensor: u32 name_len, name, u32 rows, u32 cols, u32 dtype(0=f32), data.
// Values are stored as float32; the in-memory engine works in double.

struct LoadedCheckpoint {
  model::ModelParams params;
  uint64_t vocab_hash = 0;
};

void SaveCheckpoint(const std::string& path, const model::ModelParams& p,
                    uint64_t vocab_hash);
LoadedCheckpoint LoadCheckpoint(const std::string& path);

// ckpt-%08d.ckpt under dir.
std::string CheckpointName(const std::string& dir, int64_t step);

}  // namespace ckpt
}  // namespace mlasr

#endif  // MLASR_CHECKPOINT_HPP_
