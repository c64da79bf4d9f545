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

#ifndef SPATIALCL_DATASET_H_
#define SPATIALCL_DATASET_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "spatialcl/roomsim.h"
#include "spatialcl/waveform.h"

namespace spatialcl {

// One row of a JSON-lines manifest:
//   {"path", "class", "azimuth_deg", "room": {"w", "l", "h", "rt60"}, "seed"}
// `path` is relative to the manifest's directory.
struct ManifestEntry {
  std::string path;
  int class_label = 0;
  double azimuth_deg = 0.0;
  RoomDims room;
  double rt60 = 0.0;
  uint64_t seed = 0;
};

struct Manifest {
  std::filesystem::path directory;  // base for relative paths
  std::vector<ManifestEntry> entries;

  std::filesystem::path Resolve(const ManifestEntry& e) const {
    return directory / e.path;
  }
  size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }
};

// Throws kIo when the file cannot be opened and kFormat on a malformed line.
Manifest ReadManifest(const std::filesystem::path& path);
void WriteManifest(const Manifest& manifest, const std::filesystem::path& path);

// Loads a recording and brings it to the working rate.
MultiChannelWaveform LoadRecording(const Manifest& manifest,
                                   const ManifestEntry& entry);

struct DatasetOptions {
  int num_scenes = 0;
  std::string split = "pretrain";
  uint64_t seed = 0;
  int num_classes = 8;
  double clip_seconds = 3.0;
  // Empty: synthetic sources. Otherwise a directory with one subdirectory
  // of WAV files per class.
  std::filesystem::path source_dir;
  SceneRanges ranges;
};

// Scene seeds live in disjoint ranges per split: the split code occupies
// the top byte, the master seed the next 32 bits, the scene index the rest.
uint64_t SceneSeed(uint64_t master_seed, const std::string& split, int index);

// Simulates num_scenes scenes into out_dir as 4-channel float WAVs and
// writes out_dir/<split>.jsonl. Returns the manifest path.
std::filesystem::path BuildDataset(const DatasetOptions& options,
                                   const std::filesystem::path& out_dir);

}  // namespace spatialcl

#endif  // SPATIALCL_DATASET_H_
