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

#ifndef SPATIALCL_FEATURES_H_
#define SPATIALCL_FEATURES_H_

#include <complex>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "spatialcl/waveform.h"

namespace spatialcl {

struct StftConfig {
  int fft_size = 512;
  int hop_size = 160;

  void Validate() const;
};

struct MelConfig {
  int num_mels = 64;
  double f_min = 50.0;
  double f_max = 8000.0;

  void Validate(int sample_rate) const;
};

struct FeatureConfig {
  StftConfig stft;
  MelConfig mel;
  int sample_rate = kWorkingSampleRate;
  // Frames kept per patch. A one-second patch yields 97 STFT frames at the
  // default settings; the last one is dropped so the map pools evenly.
  int num_frames = 96;
};

// Complex STFT, frame-major: the bins of frame t are contiguous.
struct Spectrogram {
  int num_bins = 0;
  int num_frames = 0;
  std::vector<std::complex<double>> data;

  std::complex<double>& at(int bin, int frame) {
    return data[static_cast<size_t>(frame) * num_bins + bin];
  }
  const std::complex<double>& at(int bin, int frame) const {
    return data[static_cast<size_t>(frame) * num_bins + bin];
  }
  std::span<const std::complex<double>> frame(int t) const {
    return {data.data() + static_cast<size_t>(t) * num_bins,
            static_cast<size_t>(num_bins)};
  }
};

// Row-major real matrix [rows x cols].
struct RealMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  RealMatrix() = default;
  RealMatrix(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c) {}
  double& at(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
  double at(int r, int c) const {
    return data[static_cast<size_t>(r) * cols + c];
  }
};

inline constexpr double kLogMelFloor = 1e-10;
inline constexpr double kPhatFloor = 1e-12;

// Periodic Hann window of the given length.
std::vector<double> HannWindow(int length);

// One-sided STFT: fft_size/2 + 1 bins, floor((N - fft_size)/hop) + 1 frames.
Spectrogram Stft(std::span<const double> signal, const StftConfig& cfg);

// HTK mel scale.
double HzToMel(double hz);
double MelToHz(double mel);

// Triangular filterbank [num_mels x num_bins] with unit peak, edges spaced
// evenly on the mel scale between f_min and f_max.
RealMatrix MelFilterbank(const MelConfig& mel, int fft_size, int sample_rate);

// log(filterbank * |X|^2 + 1e-10), [num_mels x frames].
RealMatrix LogMel(const Spectrogram& spec, const MelConfig& mel, int fft_size,
                  int sample_rate);

// GCC-PHAT of channel i against channel j, [num_lags x frames]. Row r holds
// lag r - num_lags/2, so zero lag sits at row num_lags/2. A peak at lag d
// means channel i lags channel j by d samples.
RealMatrix GccPhat(const Spectrogram& spec_i, const Spectrogram& spec_j,
                   int num_lags);

struct ChannelRole {
  enum class Kind : uint8_t { kMel, kGcc };
  Kind kind = Kind::kMel;
  int mic_a = 0;  // the mic for Mel, first mic of the pair for GCC
  int mic_b = 0;

  bool operator==(const ChannelRole&) const = default;
};

// Mel channels (one per mic) followed by GCC channels for the mic pairs in
// lexicographic order, each [num_bins x num_frames].
struct FeatureStack {
  int num_channels = 0;
  int num_bins = 0;
  int num_frames = 0;
  std::vector<float> data;
  std::vector<ChannelRole> roles;

  FeatureStack() = default;
  FeatureStack(int c, int f, int t)
      : num_channels(c), num_bins(f), num_frames(t),
        data(static_cast<size_t>(c) * f * t, 0.0f) {}

  size_t plane_size() const { return static_cast<size_t>(num_bins) * num_frames; }
  std::span<float> channel(int c) {
    return {data.data() + c * plane_size(), plane_size()};
  }
  std::span<const float> channel(int c) const {
    return {data.data() + c * plane_size(), plane_size()};
  }
  float& at(int c, int f, int t) {
    return data[c * plane_size() + static_cast<size_t>(f) * num_frames + t];
  }
  float at(int c, int f, int t) const {
    return data[c * plane_size() + static_cast<size_t>(f) * num_frames + t];
  }
};

// M + M(M-1)/2.
int NumStackChannels(int num_mics);
// Channel roles for an M-mic stack in canonical order.
std::vector<ChannelRole> StackRoles(int num_mics);
// Index of the GCC channel for pair (a, b), a < b.
int GccChannelIndex(int num_mics, int a, int b);

FeatureStack ExtractStack(const MultiChannelWaveform& patch,
                          const FeatureConfig& cfg);

// Extracts every waveform in `patches`; parallel over patches.
std::vector<FeatureStack> ExtractBatch(
    std::span<const MultiChannelWaveform> patches, const FeatureConfig& cfg);

// Per-channel standardization statistics over a set of stacks.
struct FeatureStats {
  std::vector<float> mean;
  std::vector<float> stddev;

  bool empty() const { return mean.empty(); }
  // (x - mean) / stddev for every channel; no-op when empty.
  void Apply(FeatureStack& stack) const;
};

FeatureStats ComputeFeatureStats(std::span<const FeatureStack> stacks);

// Debug dump: "SCLF", uint32 C, F, T, then C*F*T float32, little-endian.
void WriteFeatureDump(const FeatureStack& stack,
                      const std::filesystem::path& path);
FeatureStack ReadFeatureDump(const std::filesystem::path& path);

}  // namespace spatialcl

#endif  // SPATIALCL_FEATURES_H_
