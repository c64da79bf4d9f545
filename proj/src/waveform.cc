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

#include "spatialcl/waveform.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "spatialcl/errors.h"

namespace spatialcl {

MultiChannelWaveform::MultiChannelWaveform(int num_channels,
                                           int64_t num_samples,
                                           int sample_rate)
    : num_channels_(num_channels),
      num_samples_(num_samples),
      sample_rate_(sample_rate),
      data_(static_cast<size_t>(num_channels) * num_samples, 0.0) {
  if (num_channels < 1 || num_samples < 0) {
    throw Error(ErrorKind::kSize, "waveform needs at least one channel");
  }
  if (sample_rate <= 0) {
    throw Error(ErrorKind::kData, "sample rate must be positive");
  }
}

MultiChannelWaveform::MultiChannelWaveform(
    const std::vector<std::vector<double>>& channels, int sample_rate) {
  if (channels.empty()) {
    throw Error(ErrorKind::kSize, "waveform needs at least one channel");
  }
  *this = MultiChannelWaveform(static_cast<int>(channels.size()),
                               static_cast<int64_t>(channels[0].size()),
                               sample_rate);
  for (int c = 0; c < num_channels_; ++c) {
    if (static_cast<int64_t>(channels[c].size()) != num_samples_) {
      throw Error(ErrorKind::kSize, "channel " + std::to_string(c) +
                                        " length differs from channel 0");
    }
    std::copy(channels[c].begin(), channels[c].end(), channel(c).begin());
  }
  if (!AllFinite()) {
    throw Error(ErrorKind::kData, "waveform contains non-finite samples");
  }
}

double MultiChannelWaveform::Peak() const {
  double peak = 0.0;
  for (double v : data_) peak = std::max(peak, std::abs(v));
  return peak;
}

bool MultiChannelWaveform::AllFinite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

MultiChannelWaveform PeakNormalize(const MultiChannelWaveform& w,
                                   double target_peak) {
  const double peak = w.Peak();
  if (peak == 0.0) return w;
  MultiChannelWaveform out = w;
  const double gain = target_peak / peak;
  for (double& v : out.data()) v *= gain;
  return out;
}

MultiChannelWaveform CropWindow(const MultiChannelWaveform& w, int64_t offset,
                                int64_t length) {
  MultiChannelWaveform out(w.num_channels(), length, w.sample_rate());
  const int64_t available =
      std::clamp<int64_t>(w.num_samples() - offset, 0, length);
  for (int c = 0; c < w.num_channels(); ++c) {
    std::copy_n(w.channel(c).begin() + offset, available,
                out.channel(c).begin());
  }
  return out;
}

int64_t NumCropOffsets(const MultiChannelWaveform& w) {
  return std::max<int64_t>(1, w.num_samples() - w.sample_rate() + 1);
}

std::pair<Patch, Patch> CropPair(const MultiChannelWaveform& w,
                                 uint64_t source_id, RngStream& rng) {
  if (w.num_samples() == 0) {
    throw Error(ErrorKind::kData, "cannot crop an empty recording");
  }
  const int64_t offsets = NumCropOffsets(w);
  const int64_t length = w.sample_rate();
  const int64_t first = static_cast<int64_t>(rng.UniformInt(offsets));
  const int64_t second = static_cast<int64_t>(rng.UniformInt(offsets));
  return {Patch{CropWindow(w, first, length), source_id},
          Patch{CropWindow(w, second, length), source_id}};
}

}  // namespace spatialcl
