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

#ifndef MLASR_FRONTEND_HPP_
#define MLASR_FRONTEND_HPP_

#include <string>
#include <utility>
#include <vector>

#include "mlasr/wav.hpp"

namespace mlasr {
namespace frontend {

struct FeatureMatrix {
  int frames = 0;
  int dim = 0;
  std::vector<double> data;  // row-major frames x dim
  double frame_shift_ms = 10.0;

  FeatureMatrix() = default;
  FeatureMatrix(int t, int d) : frames(t), dim(d), data(static_cast<size_t>(t) * d, 0.0) {}

  double& At(int t, int d) { return data[static_cast<size_t>(t) * dim + d]; }
  double At(int t, int d) const { return data[static_cast<size_t>(t) * dim + d]; }
};

struct FrontendConfig {
  int n_mels = 80;
  double window_ms = 25.0;
  double shift_ms = 10.0;
  int left_stack = 3;
  int downsample = 3;
  std::vector<double> perturb_factors;  // empty = no augmentation copies
  double dither = 0.0;                  // stddev of added noise; 0 disables
  double fmin = 20.0;
  double fmax = 0.0;  // 0 -> Nyquist
};

// 25ms/10ms framing, pre-emphasis 0.97, Hann window, power spectrum,
// HTK-Mel triangular filters, natural log floored at 1e-10.
FeatureMatrix LogMel(const audio::Waveform& w, const FrontendConfig& cfg);

// Normalizes one speaker group in place: pooled per-dimension mean 0 and
// population variance 1 across all frames of the group. Zero-variance
// dimensions are mean-shifted only.
void CmvnGroup(const std::vector<FeatureMatrix*>& group);

// Groups by speaker id, then normalizes each group.
void CmvnBySpeaker(std::vector<FeatureMatrix>& feats,
                   const std::vector<std::string>& speakers);

// Output frame t' = concat of base-left .. base frames, base = factor * t',
// replicate-padding frame 0; length ceil(T/factor), dim D*(left+1).
FeatureMatrix StackDownsample(const FeatureMatrix& f, int left, int factor);

// Linear-interpolation resampling: output length round(N*factor), sample i
// reads input position i/factor. Sample rate is unchanged.
audio::Waveform SpeedPerturb(const audio::Waveform& w, double factor);

namespace detail {

// In-place radix-2 FFT; size must be a power of two.
void Fft(std::vector<double>& re, std::vector<double>& im);

int NextPow2(int n);

// Per-mel-bin (fft_bin, weight) pairs for an HTK-scale triangular bank.
std::vector<std::vector<std::pair<int, double>>> MelFilterbank(
    int n_mels, int n_fft, int sample_rate, double fmin, double fmax);

}  // namespace detail

}  // namespace frontend
}  // namespace mlasr

#endif  // MLASR_FRONTEND_HPP_
