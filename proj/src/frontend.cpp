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

#include "mlasr/frontend.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "mlasr/common.hpp"
#include "mlasr/rng.hpp"

namespace mlasr {
namespace frontend {

namespace detail {

int NextPow2(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

void Fft(std::vector<double>& re, std::vector<double>& im) {
  const size_t n = re.size();
  if (n == 0 || (n & (n - 1)) != 0 || im.size() != n) {
    throw DataError("fft size must be a power of two");
  }
  // Bit-reversal permutation.
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) {
      std::swap(re[i], re[j]);
      std::swap(im[i], im[j]);
    }
  }
  const double kPi = 3.14159265358979323846;
  for (size_t len = 2; len <= n; len <<= 1) {
    double ang = -2.0 * kPi / static_cast<double>(len);
    double wr = std::cos(ang), wi = std::sin(ang);
    for (size_t i = 0; i < n; i += len) {
      double cr = 1.0, ci = 0.0;
      for (size_t k = 0; k < len / 2; ++k) {
        size_t a = i + k, b = i + k + len / 2;
        double tr = re[b] * cr - im[b] * ci;
        double ti = re[b] * ci + im[b] * cr;
        re[b] = re[a] - tr;
        im[b] = im[a] - ti;
        re[a] += tr;
        im[a] += ti;
        double ncr = cr * wr - ci * wi;
        ci = cr * wi + ci * wr;
        cr = ncr;
      }
    }
  }
}

std::vector<std::vector<std::pair<int, double>>> MelFilterbank(
    int n_mels, int n_fft, int sample_rate, double fmin, double fmax) {
  if (fmax <= 0.0) fmax = sample_rate / 2.0;
  auto hz_to_mel = [](double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); };
  auto mel_to_hz = [](double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); };
  double mel_lo = hz_to_mel(fmin), mel_hi = hz_to_mel(fmax);
  if (!(mel_hi > mel_lo)) throw DataError("invalid mel range");
  std::vector<double> centers(n_mels + 2);
  for (int i = 0; i < n_mels + 2; ++i) {
    centers[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * i / (n_mels + 1));
  }
  std::vector<std::vector<std::pair<int, double>>> bank(n_mels);
  int n_bins = n_fft / 2 + 1;
  for (int m = 0; m < n_mels; ++m) {
    double lo = centers[m], mid = centers[m + 1], hi = centers[m + 2];
    for (int k = 0; k < n_bins; ++k) {
      double f = static_cast<double>(k) * sample_rate / n_fft;
      double wgt = 0.0;
      if (f > lo && f < mid) {
        wgt = (f - lo) / (mid - lo);
      } else if (f >= mid && f < hi) {
        wgt = (hi - f) / (hi - mid);
      }
      if (wgt > 0.0) bank[m].emplace_back(k, wgt);
    }
  }
  return bank;
}

}  // namespace detail

FeatureMatrix LogMel(const audio::Waveform& w, const FrontendConfig& cfg) {
  if (w.samples.empty()) throw DataError("empty audio: " + w.utt_id);
  if (w.sample_rate <= 0) throw DataError("invalid sample rate: " + w.utt_id);
  const int win = static_cast<int>(std::lround(cfg.window_ms * w.sample_rate / 1000.0));
  const int hop = static_cast<int>(std::lround(cfg.shift_ms * w.sample_rate / 1000.0));
  if (win <= 0 || hop <= 0 || hop >= win) throw DataError("bad window/shift config");
  const int n = static_cast<int>(w.samples.size());
  if (n < win) throw DataError("utterance too short: " + w.utt_id);
  const int num_frames = 1 + (n - win) / hop;
  const int n_fft = detail::NextPow2(win);
  auto bank = detail::MelFilterbank(cfg.n_mels, n_fft, w.sample_rate, cfg.fmin, cfg.fmax);

  const double kPi = 3.14159265358979323846;
  std::vector<double> hann(win);
  for (int i = 0; i < win; ++i) {
    hann[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * i / (win - 1));
  }

  // Dither is deterministic per utterance so re-featurizing reproduces bits.
  Rng dither_rng(Fnv1a64(w.utt_id));

  FeatureMatrix out(num_frames, cfg.n_mels);
  out.frame_shift_ms = cfg.shift_ms;
  std::vector<double> re(n_fft), im(n_fft), frame(win);
  for (int t = 0; t < num_frames; ++t) {
    const double* src = w.samples.data() + static_cast<size_t>(t) * hop;
    for (int i = 0; i < win; ++i) frame[i] = src[i];
    if (cfg.dither > 0.0) {
      for (int i = 0; i < win; ++i) frame[i] += cfg.dither * dither_rng.Gaussian();
    }
    // Pre-emphasis within the frame; first sample subtracts itself.
    for (int i = win - 1; i > 0; --i) frame[i] -= 0.97 * frame[i - 1];
    frame[0] -= 0.97 * frame[0];
    std::fill(re.begin(), re.end(), 0.0);
    std::fill(im.begin(), im.end(), 0.0);
    for (int i = 0; i < win; ++i) re[i] = frame[i] * hann[i];
    detail::Fft(re, im);
    for (int m = 0; m < cfg.n_mels; ++m) {
      double e = 0.0;
      for (const auto& [k, wgt] : bank[m]) {
        e += wgt * (re[k] * re[k] + im[k] * im[k]);
      }
      out.At(t, m) = std::log(std::max(e, 1e-10));
    }
  }
  return out;
}

void CmvnGroup(const std::vector<FeatureMatrix*>& group) {
  if (group.empty()) return;
  const int dim = group[0]->dim;
  int64_t total = 0;
  for (const FeatureMatrix* f : group) {
    if (f->dim != dim) throw DataError("cmvn: dimension mismatch within speaker group");
    total += f->frames;
  }
  if (total == 0) throw DataError("cmvn: speaker group has no frames");
  std::vector<double> mean(dim, 0.0), var(dim, 0.0);
  for (const FeatureMatrix* f : group) {
    for (int t = 0; t < f->frames; ++t) {
      for (int d = 0; d < dim; ++d) mean[d] += f->At(t, d);
    }
  }
  for (int d = 0; d < dim; ++d) mean[d] /= static_cast<double>(total);
  for (const FeatureMatrix* f : group) {
    for (int t = 0; t < f->frames; ++t) {
      for (int d = 0; d < dim; ++d) {
        double dv = f->At(t, d) - mean[d];
        var[d] += dv * dv;
      }
    }
  }
  for (int d = 0; d < dim; ++d) var[d] /= static_cast<double>(total);
  std::vector<double> scale(dim);
  for (int d = 0; d < dim; ++d) {
    scale[d] = var[d] > 1e-12 ? 1.0 / std::sqrt(var[d]) : 1.0;
  }
  for (FeatureMatrix* f : group) {
    for (int t = 0; t < f->frames; ++t) {
      for (int d = 0; d < dim; ++d) {
        f->At(t, d) = (f->At(t, d) - mean[d]) * scale[d];
      }
    }
  }
}

void CmvnBySpeaker(std::vector<FeatureMatrix>& feats,
                   const std::vector<std::string>& speakers) {
  if (feats.size() != speakers.size()) throw DataError("cmvn: speaker list size mismatch");
  std::map<std::string, std::vector<FeatureMatrix*>> groups;
  for (size_t i = 0; i < feats.size(); ++i) {
    groups[speakers[i]].push_back(&feats[i]);
  }
  for (auto& [spk, group] : groups) CmvnGroup(group);
}

FeatureMatrix StackDownsample(const FeatureMatrix& f, int left, int factor) {
  if (left < 0 || factor < 1) throw DataError("stack: left >= 0 and factor >= 1 required");
  if (f.frames == 0) throw DataError("stack: empty feature matrix");
  const int out_frames = (f.frames + factor - 1) / factor;
  FeatureMatrix out(out_frames, f.dim * (left + 1));
  out.frame_shift_ms = f.frame_shift_ms * factor;
  for (int t = 0; t < out_frames; ++t) {
    int base = factor * t;
    for (int k = 0; k <= left; ++k) {
      int src = std::max(base - left + k, 0);
      for (int d = 0; d < f.dim; ++d) {
        out.At(t, k * f.dim + d) = f.At(src, d);
      }
    }
  }
  return out;
}

audio::Waveform SpeedPerturb(const audio::Waveform& w, double factor) {
  if (!(factor > 0.0)) throw DataError("speed perturb factor must be positive");
  audio::Waveform out = w;
  const int n = static_cast<int>(w.samples.size());
  const int out_n = static_cast<int>(std::llround(n * factor));
  out.samples.assign(out_n, 0.0);
  for (int i = 0; i < out_n; ++i) {
    double pos = i / factor;
    int lo = static_cast<int>(pos);
    double frac = pos - lo;
    if (lo >= n - 1) {
      out.samples[i] = w.samples[n - 1];
    } else if (frac == 0.0) {
      out.samples[i] = w.samples[lo];
    } else {
      out.samples[i] = w.samples[lo] * (1.0 - frac) + w.samples[lo + 1] * frac;
    }
  }
  return out;
}

}  // namespace frontend
}  // namespace mlasr
