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

#include "spatialcl/features.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <tuple>

#include "spatialcl/errors.h"
#include "spatialcl/fft.h"

namespace spatialcl {

void StftConfig::Validate() const {
  if (fft_size < 2 || (fft_size & (fft_size - 1)) != 0) {
    throw Error(ErrorKind::kConfig, "fft_size must be a power of two");
  }
  if (hop_size < 1 || hop_size > fft_size) {
    throw Error(ErrorKind::kConfig, "hop_size must be in [1, fft_size]");
  }
}

void MelConfig::Validate(int sample_rate) const {
  if (num_mels < 1) throw Error(ErrorKind::kConfig, "num_mels must be >= 1");
  if (!(f_min >= 0.0 && f_min < f_max && f_max <= sample_rate / 2.0)) {
    throw Error(ErrorKind::kConfig,
                "mel range must satisfy 0 <= f_min < f_max <= sample_rate/2");
  }
}

std::vector<double> HannWindow(int length) {
  std::vector<double> w(length);
  for (int n = 0; n < length; ++n) {
    w[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * n / length);
  }
  return w;
}

Spectrogram Stft(std::span<const double> signal, const StftConfig& cfg) {
  cfg.Validate();
  const int n = static_cast<int>(signal.size());
  if (n < cfg.fft_size) {
    throw Error(ErrorKind::kSize, "signal of " + std::to_string(n) +
                                      " samples is shorter than one frame");
  }
  const RealFft fft(cfg.fft_size);
  const std::vector<double> window = HannWindow(cfg.fft_size);
  Spectrogram spec;
  spec.num_bins = fft.num_bins();
  spec.num_frames = (n - cfg.fft_size) / cfg.hop_size + 1;
  spec.data.resize(static_cast<size_t>(spec.num_bins) * spec.num_frames);
  std::vector<double> frame(cfg.fft_size);
  for (int t = 0; t < spec.num_frames; ++t) {
    const double* src = signal.data() + static_cast<size_t>(t) * cfg.hop_size;
    for (int i = 0; i < cfg.fft_size; ++i) frame[i] = src[i] * window[i];
    fft.Forward(frame, {spec.data.data() + static_cast<size_t>(t) * spec.num_bins,
                        static_cast<size_t>(spec.num_bins)});
  }
  return spec;
}

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double MelToHz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

RealMatrix MelFilterbank(const MelConfig& mel, int fft_size, int sample_rate) {
  mel.Validate(sample_rate);
  const int bins = fft_size / 2 + 1;
  const double mel_lo = HzToMel(mel.f_min);
  const double mel_hi = HzToMel(mel.f_max);
  std::vector<double> edges(mel.num_mels + 2);
  for (int i = 0; i < mel.num_mels + 2; ++i) {
    edges[i] = MelToHz(mel_lo + (mel_hi - mel_lo) * i / (mel.num_mels + 1));
  }
  RealMatrix fb(mel.num_mels, bins);
  for (int m = 0; m < mel.num_mels; ++m) {
    const double left = edges[m];
    const double center = edges[m + 1];
    const double right = edges[m + 2];
    for (int k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate / fft_size;
      double weight = 0.0;
      if (f > left && f <= center) {
        weight = (f - left) / (center - left);
      } else if (f > center && f < right) {
        weight = (right - f) / (right - center);
      }
      fb.at(m, k) = weight;
    }
  }
  return fb;
}

namespace {

// Non-zero span of each triangular filter.
struct SparseFilterbank {
  std::vector<int> first;
  std::vector<std::vector<double>> weights;
};

const SparseFilterbank& CachedFilterbank(const MelConfig& mel, int fft_size,
                                         int sample_rate) {
  using Key = std::tuple<int, double, double, int, int>;
  static std::mutex mu;
  static std::map<Key, SparseFilterbank>* cache =
      new std::map<Key, SparseFilterbank>();
  const Key key{mel.num_mels, mel.f_min, mel.f_max, fft_size, sample_rate};
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache->find(key);
  if (it != cache->end()) return it->second;
  const RealMatrix dense = MelFilterbank(mel, fft_size, sample_rate);
  SparseFilterbank fb;
  for (int m = 0; m < dense.rows; ++m) {
    int lo = 0, hi = -1;
    for (int k = 0; k < dense.cols; ++k) {
      if (dense.at(m, k) != 0.0) {
        if (hi < 0) lo = k;
        hi = k;
      }
    }
    fb.first.push_back(lo);
    fb.weights.emplace_back();
    for (int k = lo; k <= hi; ++k) fb.weights.back().push_back(dense.at(m, k));
  }
  return cache->emplace(key, std::move(fb)).first->second;
}

}  // namespace

RealMatrix LogMel(const Spectrogram& spec, const MelConfig& mel, int fft_size,
                  int sample_rate) {
  if (spec.num_bins != fft_size / 2 + 1) {
    throw Error(ErrorKind::kSize, "spectrogram does not match fft_size");
  }
  const SparseFilterbank& fb = CachedFilterbank(mel, fft_size, sample_rate);
  RealMatrix out(mel.num_mels, spec.num_frames);
  std::vector<double> power(spec.num_bins);
  for (int t = 0; t < spec.num_frames; ++t) {
    const auto frame = spec.frame(t);
    for (int k = 0; k < spec.num_bins; ++k) power[k] = std::norm(frame[k]);
    for (int m = 0; m < mel.num_mels; ++m) {
      const int k0 = fb.first[m];
      const std::vector<double>& w = fb.weights[m];
      double energy = 0.0;
      for (size_t i = 0; i < w.size(); ++i) energy += w[i] * power[k0 + i];
      out.at(m, t) = std::log(energy + kLogMelFloor);
    }
  }
  return out;
}

RealMatrix GccPhat(const Spectrogram& spec_i, const Spectrogram& spec_j,
                   int num_lags) {
  if (spec_i.num_bins != spec_j.num_bins ||
      spec_i.num_frames != spec_j.num_frames) {
    throw Error(ErrorKind::kSize, "GCC-PHAT inputs differ in shape");
  }
  const int fft_size = 2 * (spec_i.num_bins - 1);
  if (num_lags < 1 || num_lags > fft_size) {
    throw Error(ErrorKind::kSize, "num_lags must be in [1, fft_size]");
  }
  const RealFft fft(fft_size);
  RealMatrix out(num_lags, spec_i.num_frames);
  std::vector<std::complex<double>> cross(spec_i.num_bins);
  std::vector<double> lags(fft_size);
  const double scale = 1.0 / fft_size;
  for (int t = 0; t < spec_i.num_frames; ++t) {
    const auto xi = spec_i.frame(t);
    const auto xj = spec_j.frame(t);
    for (int k = 0; k < spec_i.num_bins; ++k) {
      const double mag =
          std::max(std::sqrt(std::norm(xi[k]) * std::norm(xj[k])), kPhatFloor);
      cross[k] = xi[k] * std::conj(xj[k]) / mag;
    }
    fft.Inverse(cross, lags);
    for (int r = 0; r < num_lags; ++r) {
      const int lag = r - num_lags / 2;
      out.at(r, t) = lags[(lag + fft_size) % fft_size] * scale;
    }
  }
  return out;
}

int NumStackChannels(int num_mics) {
  return num_mics + num_mics * (num_mics - 1) / 2;
}

std::vector<ChannelRole> StackRoles(int num_mics) {
  std::vector<ChannelRole> roles;
  for (int m = 0; m < num_mics; ++m) {
    roles.push_back({ChannelRole::Kind::kMel, m, m});
  }
  for (int a = 0; a < num_mics; ++a) {
    for (int b = a + 1; b < num_mics; ++b) {
      roles.push_back({ChannelRole::Kind::kGcc, a, b});
    }
  }
  return roles;
}

int GccChannelIndex(int num_mics, int a, int b) {
  if (a > b) std::swap(a, b);
  int index = num_mics;
  for (int i = 0; i < a; ++i) index += num_mics - 1 - i;
  return index + (b - a - 1);
}

FeatureStack ExtractStack(const MultiChannelWaveform& patch,
                          const FeatureConfig& cfg) {
  if (patch.sample_rate() != cfg.sample_rate) {
    throw Error(ErrorKind::kData, "patch sample rate " +
                                      std::to_string(patch.sample_rate()) +
                                      " does not match feature config");
  }
  const int mics = patch.num_channels();
  std::vector<Spectrogram> specs;
  specs.reserve(mics);
  for (int m = 0; m < mics; ++m) specs.push_back(Stft(patch.channel(m), cfg.stft));
  const int frames = std::min(specs[0].num_frames, cfg.num_frames);
  const int bins = cfg.mel.num_mels;

  FeatureStack stack(NumStackChannels(mics), bins, frames);
  stack.roles = StackRoles(mics);
  auto store = [&](int channel, const RealMatrix& m) {
    for (int f = 0; f < bins; ++f) {
      for (int t = 0; t < frames; ++t) {
        stack.at(channel, f, t) = static_cast<float>(m.at(f, t));
      }
    }
  };
  for (int m = 0; m < mics; ++m) {
    store(m, LogMel(specs[m], cfg.mel, cfg.stft.fft_size, cfg.sample_rate));
  }
  for (int c = mics; c < stack.num_channels; ++c) {
    const ChannelRole& role = stack.roles[c];
    store(c, GccPhat(specs[role.mic_a], specs[role.mic_b], bins));
  }
  return stack;
}

std::vector<FeatureStack> ExtractBatch(
    std::span<const MultiChannelWaveform> patches, const FeatureConfig& cfg) {
  std::vector<FeatureStack> out(patches.size());
  const int n = static_cast<int>(patches.size());
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) out[i] = ExtractStack(patches[i], cfg);
  return out;
}

void FeatureStats::Apply(FeatureStack& stack) const {
  if (empty()) return;
  if (static_cast<int>(mean.size()) != stack.num_channels) {
    throw Error(ErrorKind::kSize, "feature statistics have " +
                                      std::to_string(mean.size()) +
                                      " channels, stack has " +
                                      std::to_string(stack.num_channels));
  }
  for (int c = 0; c < stack.num_channels; ++c) {
    const float mu = mean[c];
    const float inv = 1.0f / stddev[c];
    for (float& v : stack.channel(c)) v = (v - mu) * inv;
  }
}

FeatureStats ComputeFeatureStats(std::span<const FeatureStack> stacks) {
  if (stacks.empty()) {
    throw Error(ErrorKind::kData, "no stacks to compute statistics from");
  }
  const int channels = stacks[0].num_channels;
  FeatureStats stats;
  stats.mean.resize(channels);
  stats.stddev.resize(channels);
  for (int c = 0; c < channels; ++c) {
    double sum = 0.0;
    double sum_sq = 0.0;
    size_t count = 0;
    for (const FeatureStack& s : stacks) {
      for (float v : s.channel(c)) {
        sum += v;
        sum_sq += static_cast<double>(v) * v;
      }
      count += s.plane_size();
    }
    const double mu = sum / count;
    const double var = std::max(sum_sq / count - mu * mu, 0.0);
    stats.mean[c] = static_cast<float>(mu);
    stats.stddev[c] = static_cast<float>(std::max(std::sqrt(var), 1e-6));
  }
  return stats;
}

void WriteFeatureDump(const FeatureStack& stack,
                      const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  auto put = [&](uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>(v >> (8 * i));
    out.write(b, 4);
  };
  out.write("SCLF", 4);
  put(static_cast<uint32_t>(stack.num_channels));
  put(static_cast<uint32_t>(stack.num_bins));
  put(static_cast<uint32_t>(stack.num_frames));
  for (float v : stack.data) put(std::bit_cast<uint32_t>(v));
  if (!out) throw Error(ErrorKind::kIo, "write failed for " + path.string());
}

FeatureStack ReadFeatureDump(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  auto get = [&]() {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) throw Error(ErrorKind::kFormat, path.string() + ": truncated");
    return static_cast<uint32_t>(b[0] | b[1] << 8 | b[2] << 16 |
                                 static_cast<uint32_t>(b[3]) << 24);
  };
  char magic[4];
  in.read(magic, 4);
  if (!in || std::string(magic, 4) != "SCLF") {
    throw Error(ErrorKind::kFormat, path.string() + ": bad feature dump magic");
  }
  const int c = static_cast<int>(get());
  const int f = static_cast<int>(get());
  const int t = static_cast<int>(get());
  FeatureStack stack(c, f, t);
  for (float& v : stack.data) v = std::bit_cast<float>(get());
  int mics = 0;
  while (NumStackChannels(mics) < c) ++mics;
  if (NumStackChannels(mics) == c) stack.roles = StackRoles(mics);
  return stack;
}

}  // namespace spatialcl
