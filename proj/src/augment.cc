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

#include "spatialcl/augment.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "spatialcl/errors.h"

namespace spatialcl {
namespace {

std::array<ChannelSwapArrangement, kNumArrangements> BuildArrangements() {
  std::array<ChannelSwapArrangement, kNumArrangements> table;
  for (int m = 0; m < 4; ++m) {
    // Rotation: the array turns by 90m, the source appears at theta - 90m.
    ChannelSwapArrangement& rot = table[m];
    rot.index = m;
    for (int k = 0; k < 4; ++k) rot.permutation[k] = (k + m) % 4;
    rot.azimuth_sign = 1;
    rot.azimuth_offset_deg = WrapDegrees(-90.0 * m);
    // Reflection across the axis at 45m degrees: theta -> 90m - theta.
    ChannelSwapArrangement& ref = table[4 + m];
    ref.index = 4 + m;
    for (int k = 0; k < 4; ++k) ref.permutation[k] = ((m - k) % 4 + 4) % 4;
    ref.azimuth_sign = -1;
    ref.azimuth_offset_deg = WrapDegrees(90.0 * m);
  }
  return table;
}

const ChannelSwapArrangement& FindByPermutation(const std::array<int, 4>& perm) {
  for (const auto& a : AllArrangements()) {
    if (a.permutation == perm) return a;
  }
  throw Error(ErrorKind::kData, "permutation is not a symmetry of the array");
}

}  // namespace

const std::array<ChannelSwapArrangement, kNumArrangements>& AllArrangements() {
  static const auto table = BuildArrangements();
  return table;
}

const ChannelSwapArrangement& IdentityArrangement() {
  return AllArrangements()[0];
}

ChannelSwapArrangement Compose(const ChannelSwapArrangement& first,
                               const ChannelSwapArrangement& second) {
  std::array<int, 4> perm;
  for (int k = 0; k < 4; ++k) perm[k] = first.permutation[second.permutation[k]];
  return FindByPermutation(perm);
}

ChannelSwapArrangement Inverse(const ChannelSwapArrangement& a) {
  std::array<int, 4> perm;
  for (int k = 0; k < 4; ++k) perm[a.permutation[k]] = k;
  return FindByPermutation(perm);
}

double WrapDegrees(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r <= -180.0) r += 360.0;
  if (r > 180.0) r -= 360.0;
  return r;
}

double TransformAzimuth(const ChannelSwapArrangement& a, double azimuth_deg) {
  return WrapDegrees(a.azimuth_sign * azimuth_deg + a.azimuth_offset_deg);
}

MultiChannelWaveform ChannelSwap(const MultiChannelWaveform& w,
                                 const ChannelSwapArrangement& a) {
  if (w.num_channels() != 4) {
    throw Error(ErrorKind::kUnsupported,
                "ChannelSwap needs 4 channels, got " +
                    std::to_string(w.num_channels()));
  }
  MultiChannelWaveform out(4, w.num_samples(), w.sample_rate());
  for (int k = 0; k < 4; ++k) {
    auto src = w.channel(a.permutation[k]);
    std::copy(src.begin(), src.end(), out.channel(k).begin());
  }
  return out;
}

ChannelSwapArrangement SampleArrangement(RngStream& rng) {
  return AllArrangements()[rng.UniformInt(kNumArrangements)];
}

MultiChannelWaveform MixNormalized(const MultiChannelWaveform& x,
                                   const MultiChannelWaveform& y,
                                   double alpha) {
  if (x.num_channels() != y.num_channels() ||
      x.num_samples() != y.num_samples() ||
      x.sample_rate() != y.sample_rate()) {
    throw Error(ErrorKind::kSize, "Mixup inputs differ in shape or rate");
  }
  MultiChannelWaveform out = PeakNormalize(x, 1.0);
  const MultiChannelWaveform yn = PeakNormalize(y, 1.0);
  auto dst = out.data();
  auto src = yn.data();
  for (size_t i = 0; i < dst.size(); ++i) {
    dst[i] = (1.0 - alpha) * dst[i] + alpha * src[i];
  }
  return out;
}

MultiChannelWaveform Mixup(const MultiChannelWaveform& x,
                           const MultiChannelWaveform& y, double alpha,
                           const MixupParams& params) {
  if (alpha < params.alpha_lo || alpha > params.alpha_hi) {
    throw Error(ErrorKind::kConfig, "Mixup alpha " + std::to_string(alpha) +
                                        " outside its configured range");
  }
  const double peak = x.Peak();
  MultiChannelWaveform mixed = MixNormalized(x, y, alpha);
  if (peak == 0.0) return x;
  return PeakNormalize(mixed, peak);
}

CropRect SampleCropRect(int num_bins, int num_frames, RngStream& rng,
                        const RrcParams& params) {
  const double log_lo = std::log(params.aspect_lo);
  const double log_hi = std::log(params.aspect_hi);
  for (int attempt = 0; attempt < 10; ++attempt) {
    const double scale = rng.Uniform(params.scale_lo, params.scale_hi);
    const double aspect = std::exp(rng.Uniform(log_lo, log_hi));
    int frames = static_cast<int>(std::lround(num_frames * std::sqrt(scale * aspect)));
    int bins = static_cast<int>(std::lround(num_bins * std::sqrt(scale / aspect)));
    frames = std::min(frames, num_frames);
    bins = std::min(bins, num_bins);
    if (frames < 2 || bins < 2) continue;
    CropRect rect;
    rect.num_bins = bins;
    rect.num_frames = frames;
    rect.bin0 = static_cast<int>(rng.UniformInt(static_cast<uint64_t>(num_bins - bins + 1)));
    rect.frame0 = static_cast<int>(rng.UniformInt(static_cast<uint64_t>(num_frames - frames + 1)));
    return rect;
  }
  return {0, 0, num_bins, num_frames};
}

FeatureStack ResizedCrop(const FeatureStack& stack, const CropRect& rect) {
  FeatureStack out = stack;
  const int nb = stack.num_bins;
  const int nf = stack.num_frames;
  // Source coordinate and interpolation weight for each output row/column.
  auto axis = [](int out_len, int start, int len) {
    std::vector<std::pair<int, double>> map(out_len);
    for (int o = 0; o < out_len; ++o) {
      const double src =
          out_len > 1 ? start + static_cast<double>(o) * (len - 1) / (out_len - 1)
                      : start;
      int i0 = static_cast<int>(std::floor(src));
      i0 = std::min(i0, start + len - 1);
      map[o] = {i0, src - i0};
    }
    return map;
  };
  const auto rows = axis(nb, rect.bin0, rect.num_bins);
  const auto cols = axis(nf, rect.frame0, rect.num_frames);
  const int last_row = rect.bin0 + rect.num_bins - 1;
  const int last_col = rect.frame0 + rect.num_frames - 1;
  for (int c = 0; c < stack.num_channels; ++c) {
    for (int f = 0; f < nb; ++f) {
      const auto [r0, wr] = rows[f];
      const int r1 = std::min(r0 + 1, last_row);
      for (int t = 0; t < nf; ++t) {
        const auto [c0, wc] = cols[t];
        const int c1 = std::min(c0 + 1, last_col);
        const double top = (1.0 - wc) * stack.at(c, r0, c0) + wc * stack.at(c, r0, c1);
        const double bottom = (1.0 - wc) * stack.at(c, r1, c0) + wc * stack.at(c, r1, c1);
        out.at(c, f, t) = static_cast<float>((1.0 - wr) * top + wr * bottom);
      }
    }
  }
  return out;
}

FeatureStack RandomResizedCrop(const FeatureStack& stack, RngStream& rng,
                               const RrcParams& params, CropRect* sampled) {
  const CropRect rect =
      SampleCropRect(stack.num_bins, stack.num_frames, rng, params);
  if (sampled) *sampled = rect;
  return ResizedCrop(stack, rect);
}

FeatureStack ChannelDrop(const FeatureStack& stack, RngStream& rng,
                         const ChannelDropParams& params,
                         std::vector<bool>* dropped) {
  FeatureStack out = stack;
  if (dropped) dropped->assign(stack.num_channels, false);
  for (int c = 0; c < stack.num_channels; ++c) {
    if (rng.Bernoulli(params.drop_probability)) {
      std::fill(out.channel(c).begin(), out.channel(c).end(), 0.0f);
      if (dropped) (*dropped)[c] = true;
    }
  }
  return out;
}

AugmentedPair ApplyPlan(const std::pair<Patch, Patch>& pair,
                        const BackgroundSource* background,
                        const AugmentationPlan& plan, const FeatureConfig& cfg,
                        const FeatureStats& stats, RngStream& rng) {
  AugmentedPair result;
  MultiChannelWaveform a = pair.first.waveform;
  MultiChannelWaveform b = pair.second.waveform;
  if (plan.channel_swap) {
    result.arrangement = SampleArrangement(rng);
    a = ChannelSwap(a, *result.arrangement);
    b = ChannelSwap(b, *result.arrangement);
  }
  if (plan.mixup) {
    if (background == nullptr) {
      throw Error(ErrorKind::kConfig, "Mixup enabled without a background pool");
    }
    const auto& mp = plan.mixup_params;
    const MultiChannelWaveform bg_a = background->Draw(pair.first.source_id, rng);
    a = Mixup(a, bg_a, rng.Uniform(mp.alpha_lo, mp.alpha_hi), mp);
    const MultiChannelWaveform bg_b = background->Draw(pair.second.source_id, rng);
    b = Mixup(b, bg_b, rng.Uniform(mp.alpha_lo, mp.alpha_hi), mp);
  }
  FeatureStack sa = ExtractStack(a, cfg);
  FeatureStack sb = ExtractStack(b, cfg);
  stats.Apply(sa);
  stats.Apply(sb);
  if (plan.random_resized_crop) {
    sa = RandomResizedCrop(sa, rng, plan.rrc_params);
    sb = RandomResizedCrop(sb, rng, plan.rrc_params);
  }
  if (plan.channel_drop) {
    sa = ChannelDrop(sa, rng, plan.channel_drop_params);
    sb = ChannelDrop(sb, rng, plan.channel_drop_params);
  }
  result.first = std::move(sa);
  result.second = std::move(sb);
  return result;
}

}  // namespace spatialcl
