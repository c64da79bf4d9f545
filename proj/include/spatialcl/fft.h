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

#ifndef SPATIALCL_FFT_H_
#define SPATIALCL_FFT_H_

#include <complex>
#include <span>

namespace spatialcl {

// Real-input FFT of fixed size backed by FFTW. Plans are created once per
// size and shared; executing them is thread-safe.
class RealFft {
 public:
  explicit RealFft(int size);

  int size() const { return size_; }
  int num_bins() const { return size_ / 2 + 1; }

  // out has num_bins() entries.
  void Forward(std::span<const double> in,
               std::span<std::complex<double>> out) const;
  // Unnormalized inverse: out[n] = sum_k X[k] e^{+2 pi i k n / N} over the
  // full Hermitian spectrum. `in` has num_bins() entries.
  void Inverse(std::span<const std::complex<double>> in,
               std::span<double> out) const;

 private:
  int size_;
  void* forward_plan_;
  void* inverse_plan_;
};

// Smallest power of two >= n.
int NextPowerOfTwo(int n);

}  // namespace spatialcl

#endif  // SPATIALCL_FFT_H_
