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

#ifndef SPATIALCL_AUGMENT_H_
#define SPATIALCL_AUGMENT_H_

// Multi-level augmentation chain. Order is fixed:
//   ChannelSwap (waveform) -> Mixup (waveform) -> feature extraction
//   -> RandomResizedCrop (Mel + GCC) -> ChannelDrop (Mel + GCC).

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "spatialcl/features.h"
#include "spatialcl/rng.h"
#include "spatialcl/waveform.h"

namespace spatialcl {

// One element of the symmetry group of a 4-mic circular array (mic k at
// array azimuth 90k degrees, counterclockwise). Output channel k of a
// swapped recording is input channel permutation[k]; the recording then
// corresponds to a source at azimuth sign * theta + offset.
struct ChannelSwapArrangement {
  int index = 0;  // 0-3 rotations, 4-7 reflections
  std::array<int, 4> permutation = {0, 1, 2, 3};
  int azimuth_sign = 1;
  double azimuth_offset_deg = 0.0;

  bool operator==(const ChannelSwapArrangement&) const = default;
};

inline constexpr int kNumArrangements = 8;

const std::array<ChannelSwapArrangement, kNumArrangements>& AllArrangements();
const ChannelSwapArrangement& IdentityArrangement();

// Arrangement equivalent to applying `first` and then `second`.
ChannelSwapArrangement Compose(const ChannelSwapArrangement& first,
                               const ChannelSwapArrangement& second);
ChannelSwapArrangement Inverse(const ChannelSwapArrangement& a);

// Wraps degrees into (-180, 180].
double WrapDegrees(double deg);
double TransformAzimuth(const ChannelSwapArrangement& a, double azimuth_deg);

// Throws kUnsupported unless w has exactly 4 channels.
MultiChannelWaveform ChannelSwap(const MultiChannelWaveform& w,
                                 const ChannelSwapArrangement& a);
ChannelSwapArrangement SampleArrangement(RngStream& rng);

struct MixupParams {
  double alpha_lo = 0.0;
  double alpha_hi = 0.01;
};

// (1 - alpha) * x^ + alpha * y^ where ^ is peak normalization to 1.
MultiChannelWaveform MixNormalized(const MultiChannelWaveform& x,
                                   const MultiChannelWaveform& y, double alpha);

// MixNormalized rescaled back to the original peak of x.
MultiChannelWaveform Mixup(const MultiChannelWaveform& x,
                           const MultiChannelWaveform& y, double alpha,
                           const MixupParams& params);

struct RrcParams {
  double scale_lo = 0.8;
  double scale_hi = 1.0;
  double aspect_lo = 0.8;
  double aspect_hi = 1.25;
};

// Crop rectangle on the (bin, frame) plane.
struct CropRect {
  int bin0 = 0;
  int frame0 = 0;
  int num_bins = 0;
  int num_frames = 0;

  bool operator==(const CropRect&) const = default;
};

// Samples a crop covering `scale` of the area with aspect ratio `aspect`
// relative to the full map (log-uniform), clamped to the map. Windows
// narrower than 2 cells are re-drawn up to 10 times before falling back to
// the full map.
CropRect SampleCropRect(int num_bins, int num_frames, RngStream& rng,
                        const RrcParams& params);

// Bilinear resize of `rect` back to the full map, same window on every
// channel. Corner-aligned, so the full-map rectangle is the identity.
FeatureStack ResizedCrop(const FeatureStack& stack, const CropRect& rect);

FeatureStack RandomResizedCrop(const FeatureStack& stack, RngStream& rng,
                               const RrcParams& params,
                               CropRect* sampled = nullptr);

struct ChannelDropParams {
  double drop_probability = 0.1;
};

// Zeroes each channel independently with the drop probability.
FeatureStack ChannelDrop(const FeatureStack& stack, RngStream& rng,
                         const ChannelDropParams& params,
                         std::vector<bool>* dropped = nullptr);

struct AugmentationPlan {
  bool channel_swap = true;
  bool mixup = true;
  bool random_resized_crop = true;
  bool channel_drop = true;
  MixupParams mixup_params;
  RrcParams rrc_params;
  ChannelDropParams channel_drop_params;

  static AugmentationPlan Full() { return {}; }
  static AugmentationPlan None() {
    AugmentationPlan p;
    p.channel_swap = p.mixup = p.random_resized_crop = p.channel_drop = false;
    return p;
  }
};

// Supplies background patches for Mixup.
class BackgroundSource {
 public:
  virtual ~BackgroundSource() = default;
  // A one-second patch from a recording other than `exclude_source_id`.
  virtual MultiChannelWaveform Draw(uint64_t exclude_source_id,
                                    RngStream& rng) const = 0;
};

struct AugmentedPair {
  FeatureStack first;
  FeatureStack second;
  std::optional<ChannelSwapArrangement> arrangement;
};

// Runs the full chain on a positive pair. The ChannelSwap arrangement is
// shared by both patches; Mixup, crop and drop draws are independent per
// patch. `stats` (may be empty) standardizes the stacks right after
// extraction, so a dropped channel sits at the channel mean.
AugmentedPair ApplyPlan(const std::pair<Patch, Patch>& pair,
                        const BackgroundSource* background,
                        const AugmentationPlan& plan, const FeatureConfig& cfg,
                        const FeatureStats& stats, RngStream& rng);

}  // namespace spatialcl

#endif  // SPATIALCL_AUGMENT_H_
