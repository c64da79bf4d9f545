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

#ifndef SPATIALCL_RESAMPLE_H_
#define SPATIALCL_RESAMPLE_H_

#include "spatialcl/waveform.h"

namespace spatialcl {

// Band-limited resampling with a 64-tap Blackman-windowed sinc. The cutoff
// sits at the lower of the two Nyquist frequencies.
MultiChannelWaveform Resample(const MultiChannelWaveform& w, int target_rate);

}  // namespace spatialcl

#endif  // SPATIALCL_RESAMPLE_H_
