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

#include "spatialcl/fft.h"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "spatialcl/errors.h"

namespace spatialcl {
namespace {

struct Plans {
  fftw_plan forward;
  fftw_plan inverse;
};

// Planner calls are not thread-safe in FFTW; execution is.
std::mutex& PlannerMutex() {
  static std::mutex mu;
  return mu;
}

Plans GetPlans(int size) {
  static std::map<int, Plans>* cache = new std::map<int, Plans>();
  std::lock_guard<std::mutex> lock(PlannerMutex());
  auto it = cache->find(size);
  if (it != cache->end()) return it->second;
  double* real = fftw_alloc_real(size);
  fftw_complex* cplx = fftw_alloc_complex(size / 2 + 1);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  Plans plans{fftw_plan_dft_r2c_1d(size, real, cplx, flags),
              fftw_plan_dft_c2r_1d(size, cplx, real, flags)};
  fftw_free(real);
  fftw_free(cplx);
  cache->emplace(size, plans);
  return plans;
}

}  // namespace

RealFft::RealFft(int size) : size_(size) {
  if (size < 2 || size % 2 != 0) {
    throw Error(ErrorKind::kConfig,
                "FFT size must be even and >= 2, got " + std::to_string(size));
  }
  const Plans plans = GetPlans(size);
  forward_plan_ = plans.forward;
  inverse_plan_ = plans.inverse;
}

void RealFft::Forward(std::span<const double> in,
                      std::span<std::complex<double>> out) const {
  if (static_cast<int>(in.size()) != size_ ||
      static_cast<int>(out.size()) != num_bins()) {
    throw Error(ErrorKind::kSize, "RealFft::Forward buffer size mismatch");
  }
  // Out-of-place r2c leaves the input untouched.
  fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_),
                       const_cast<double*>(in.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
}

void RealFft::Inverse(std::span<const std::complex<double>> in,
                      std::span<double> out) const {
  if (static_cast<int>(in.size()) != num_bins() ||
      static_cast<int>(out.size()) != size_) {
    throw Error(ErrorKind::kSize, "RealFft::Inverse buffer size mismatch");
  }
  // c2r overwrites its input.
  std::vector<std::complex<double>> scratch(in.begin(), in.end());
  fftw_execute_dft_c2r(static_cast<fftw_plan>(inverse_plan_),
                       reinterpret_cast<fftw_complex*>(scratch.data()),
                       out.data());
}

int NextPowerOfTwo(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace spatialcl
