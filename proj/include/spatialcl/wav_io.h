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

#ifndef SPATIALCL_WAV_IO_H_
#define SPATIALCL_WAV_IO_H_

#include <filesystem>

#include "spatialcl/waveform.h"

namespace spatialcl {

// Reads a RIFF/WAVE file holding PCM 16/24/32-bit or IEEE float32 samples.
// Integer samples are scaled by 2^-(bits-1), so full scale maps to [-1, 1).
// The sample rate is taken from the header as is (no resampling).
MultiChannelWaveform LoadWav(const std::filesystem::path& path);

// Writes float32 samples (WAVE_FORMAT_IEEE_FLOAT).
void SaveWav(const MultiChannelWaveform& w, const std::filesystem::path& path);

}  // namespace spatialcl

#endif  // SPATIALCL_WAV_IO_H_
