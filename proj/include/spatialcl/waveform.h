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

#ifndef SPATIALCL_WAVEFORM_H_
#define SPATIALCL_WAVEFORM_H_

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "spatialcl/rng.h"

namespace spatialcl {

// All processing runs at this rate; sources are resampled on load.
inline constexpr int kWorkingSampleRate = 16000;

// M-channel time-domain signal. Channels are stored contiguously, channel
// after channel, and always share one length.
class MultiChannelWaveform {
 public:
  MultiChannelWaveform() = default;
  MultiChannelWaveform(int num_channels, int64_t num_samples, int sample_rate);
  // Builds from per-channel vectors; throws kSize if lengths differ or the
  // list is empty, kData on non-finite samples.
  MultiChannelWaveform(const std::vector<std::vector<double>>& channels,
                       int sample_rate);

  int num_channels() const { return num_channels_; }
  int64_t num_samples() const { return num_samples_; }
  int sample_rate() const { return sample_rate_; }
  double duration_seconds() const {
    return static_cast<double>(num_samples_) / sample_rate_;
  }

  std::span<double> channel(int c) {
    return {data_.data() + c * num_samples_, static_cast<size_t>(num_samples_)};
  }
  std::span<const double> channel(int c) const {
    return {data_.data() + c * num_samples_, static_cast<size_t>(num_samples_)};
  }
  double& at(int c, int64_t n) { return data_[c * num_samples_ + n]; }
  double at(int c, int64_t n) const { return data_[c * num_samples_ + n]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  // Largest |sample| over all channels.
  double Peak() const;
  bool AllFinite() const;

  bool operator==(const MultiChannelWaveform&) const = default;

 private:
  int num_channels_ = 0;
  int64_t num_samples_ = 0;
  int sample_rate_ = kWorkingSampleRate;
  std::vector<double> data_;
};

// A one-second crop tagged with the recording it came from. Two patches with
// the same source_id form a positive pair.
struct Patch {
  MultiChannelWaveform waveform;
  uint64_t source_id = 0;
};

// Scales every channel by one common gain so the overall peak equals
// target_peak. An all-zero waveform is returned unchanged.
MultiChannelWaveform PeakNormalize(const MultiChannelWaveform& w,
                                   double target_peak);

// Copies `length` samples per channel starting at `offset`; samples past the
// end of `w` are zero.
MultiChannelWaveform CropWindow(const MultiChannelWaveform& w, int64_t offset,
                                int64_t length);

// Number of distinct start offsets for a one-second crop of w.
int64_t NumCropOffsets(const MultiChannelWaveform& w);

// Two independent, uniformly placed one-second crops. Recordings shorter
// than one second are zero-padded at the end.
std::pair<Patch, Patch> CropPair(const MultiChannelWaveform& w,
                                 uint64_t source_id, RngStream& rng);

}  // namespace spatialcl

#endif  // SPATIALCL_WAVEFORM_H_
