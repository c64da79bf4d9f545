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

#include "spatialcl/resample.h"

#include <cmath>
#include <numbers>

#include "spatialcl/errors.h"

namespace spatialcl {
namespace {

constexpr int kTaps = 64;

double Sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

double Blackman(double x, double half_width) {
  // x in [-half_width, half_width]
  const double t = (x + half_width) / (2.0 * half_width);
  if (t < 0.0 || t > 1.0) return 0.0;
  return 0.42 - 0.5 * std::cos(2.0 * std::numbers::pi * t) +
         0.08 * std::cos(4.0 * std::numbers::pi * t);
}

}  // namespace

MultiChannelWaveform Resample(const MultiChannelWaveform& w, int target_rate) {
  if (target_rate <= 0) {
    throw Error(ErrorKind::kConfig, "target sample rate must be positive");
  }
  if (w.sample_rate() == target_rate) return w;
  const double ratio = static_cast<double>(target_rate) / w.sample_rate();
  const double cutoff = std::min(1.0, ratio);  // relative to input Nyquist
  const int64_t out_len =
      static_cast<int64_t>(std::floor(w.num_samples() * ratio));
  MultiChannelWaveform out(w.num_channels(), out_len, target_rate);
  const double half = kTaps / 2.0;
  // Scale the kernel footprint when downsampling so the window still spans
  // kTaps zero crossings of the lowered cutoff.
  const double half_in = half / cutoff;
  for (int c = 0; c < w.num_channels(); ++c) {
    auto src = w.channel(c);
    auto dst = out.channel(c);
    for (int64_t m = 0; m < out_len; ++m) {
      const double t = m / ratio;
      const int64_t lo = static_cast<int64_t>(std::ceil(t - half_in));
      const int64_t hi = static_cast<int64_t>(std::floor(t + half_in));
      double acc = 0.0;
      for (int64_t k = std::max<int64_t>(lo, 0);
           k <= std::min<int64_t>(hi, w.num_samples() - 1); ++k) {
        const double x = t - k;
        acc += src[k] * cutoff * Sinc(cutoff * x) * Blackman(x, half_in);
      }
      dst[m] = acc;
    }
  }
  return out;
}

}  // namespace spatialcl
