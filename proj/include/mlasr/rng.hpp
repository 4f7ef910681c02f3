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

#ifndef MLASR_RNG_HPP_
#define MLASR_RNG_HPP_

#include <cmath>
#include <cstdint>

namespace mlasr {

// splitmix64 generator. The standard <random> distributions are not
// bit-stable across implementations, so everything seeded (corpus
// synthesis, weight init, shuffles) goes through this.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t NextU64() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double NextDouble() {
    return static_cast<double>(NextU64() >> 11) * 0x1.0p-53;
  }

  // Uniform in [lo, hi).
  double Uniform(double lo, double hi) { return lo + (hi - lo) * NextDouble(); }

  // Uniform integer in [0, n).
  uint64_t NextBelow(uint64_t n) { return NextU64() % n; }

  int UniformInt(int lo, int hi_inclusive) {
    return lo + static_cast<int>(NextBelow(static_cast<uint64_t>(hi_inclusive - lo + 1)));
  }

  // Box-Muller; one value per call.
  double Gaussian() {
    double u1 = NextDouble();
    double u2 = NextDouble();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  // Derives an independent stream, e.g. per utterance id.
  Rng Fork(uint64_t salt) {
    Rng child(NextU64() ^ (salt * 0x9e3779b97f4a7c15ULL));
    return child;
  }

 private:
  uint64_t state_;
};

}  // namespace mlasr

#endif  // MLASR_RNG_HPP_
