// Copyright 2026 The spatialcl Authors.
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

#ifndef SPATIALCL_RNG_H_
#define SPATIALCL_RNG_H_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace spatialcl {

// Seeded random stream. The engine is std::mt19937_64, whose output sequence
// is fixed by the standard; the real-valued conversions are implemented here
// because the std distributions are implementation-defined.
class RngStream {
 public:
  explicit RngStream(uint64_t seed);

  uint64_t seed() const { return seed_; }

  uint64_t NextU64() { return engine_(); }
  // Uniform in [0, 1) with 53 random bits.
  double Uniform();
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  // Uniform integer in [0, n). n must be positive.
  uint64_t UniformInt(uint64_t n);
  // Uniform integer in [lo, hi], inclusive.
  int64_t UniformInt(int64_t lo, int64_t hi);
  double Normal();
  bool Bernoulli(double p) { return Uniform() < p; }

  // Independent child stream keyed by `key`; does not advance this stream.
  RngStream Split(uint64_t key) const;

  template <typename T>
  void Shuffle(std::span<T> items) {
    for (size_t i = items.size(); i > 1; --i) {
      size_t j = UniformInt(i);
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

// SplitMix64 finalizer, used to derive child seeds.
uint64_t MixSeed(uint64_t a, uint64_t b);

}  // namespace spatialcl

#endif  // SPATIALCL_RNG_H_
