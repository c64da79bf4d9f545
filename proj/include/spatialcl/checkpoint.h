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

#ifndef SPATIALCL_CHECKPOINT_H_
#define SPATIALCL_CHECKPOINT_H_

// Binary checkpoint, little-endian throughout:
//   "SPCLCKPT", u32 version,
//   network config: u32 in_channels, height, width, conv_widths[3],
//                   embedding_dim, projection_dim, num_classes
//   u32 epochs_done, u64 seed,
//   u32 param count, then per param: u32 name length, name bytes, u8 group,
//                   u8 rank, u32 dims[rank]
//   u32 stats channels, f32 mean[], f32 stddev[]
//   u8 has_velocity
//   f32 parameter blobs in manifest order, then velocity blobs if present.

#include <cstdint>
#include <filesystem>

#include "spatialcl/features.h"
#include "spatialcl/network.h"
#include "spatialcl/optimizer.h"

namespace spatialcl {

inline constexpr uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  Network<float> network;
  OptimizerState<float> optimizer;  // velocity empty when not saved
  FeatureStats stats;
  int epochs_done = 0;
  uint64_t seed = 0;
};

// Writes to a temporary file and renames it into place, so an interrupted
// save never clobbers the previous checkpoint.
void SaveCheckpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint LoadCheckpoint(const std::filesystem::path& path);

}  // namespace spatialcl

#endif  // SPATIALCL_CHECKPOINT_H_
