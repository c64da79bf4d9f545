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

#ifndef SPATIALCL_PRETRAIN_H_
#define SPATIALCL_PRETRAIN_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "spatialcl/augment.h"
#include "spatialcl/checkpoint.h"
#include "spatialcl/dataset.h"
#include "spatialcl/features.h"
#include "spatialcl/network.h"
#include "spatialcl/ntxent.h"
#include "spatialcl/optimizer.h"

namespace spatialcl {

// Read-only access to the recordings of a manifest. Recordings are held in
// memory as float32 when they fit in `cache_bytes`, and otherwise read from
// disk on every access. Safe to call from several threads.
class RecordingPool {
 public:
  explicit RecordingPool(Manifest manifest,
                         size_t cache_bytes = size_t{1} << 30);

  size_t size() const { return manifest_.size(); }
  const Manifest& manifest() const { return manifest_; }
  bool cached() const { return !cache_.empty(); }

  MultiChannelWaveform Load(size_t index) const;

 private:
  struct Cached {
    int channels = 0;
    int64_t samples = 0;
    std::vector<float> data;
  };
  Manifest manifest_;
  std::vector<Cached> cache_;
};

// Mixup backgrounds: a random one-second crop of another pool recording.
class PoolBackground : public BackgroundSource {
 public:
  explicit PoolBackground(const RecordingPool* pool) : pool_(pool) {}
  MultiChannelWaveform Draw(uint64_t exclude_source_id,
                            RngStream& rng) const override;

 private:
  const RecordingPool* pool_;
};

struct PairBatch {
  Batch<float> stacks;               // [2N x C x F x T]
  std::vector<uint64_t> source_ids;  // one per row
};

// One positive pair per listed recording, run through the plan; rows 2m
// and 2m+1 come from recordings[m]. Each pair draws from its own child
// stream of rng, so the result does not depend on the thread count.
PairBatch AssembleBatch(const RecordingPool& pool,
                        std::span<const size_t> recordings,
                        const AugmentationPlan& plan,
                        const FeatureConfig& features,
                        const FeatureStats& stats, RngStream& rng);

// Samples num_pairs distinct recordings, then assembles them. Throws
// kConfig when num_pairs exceeds the pool size.
PairBatch AssembleBatch(const RecordingPool& pool, int num_pairs,
                        const AugmentationPlan& plan,
                        const FeatureConfig& features,
                        const FeatureStats& stats, RngStream& rng);

// Per-channel statistics of plain (unaugmented) random crops of up to
// max_recordings pool recordings.
FeatureStats EstimateFeatureStats(const RecordingPool& pool,
                                  const FeatureConfig& features,
                                  int max_recordings, RngStream& rng);

struct PretrainConfig {
  int batch_pairs = 64;
  int epochs = 100;
  // Negative: 0.2 scaled linearly by the batch size, 0.2 * 2N / 512.
  double base_lr = -1.0;
  int warmup_epochs = 10;
  SgdConfig sgd;
  NtXentConfig ntxent;
  AugmentationPlan plan;
  FeatureConfig features;
  NetworkConfig network;
  int checkpoint_every = 10;
  int stats_recordings = 256;
  uint64_t seed = 0;

  double EffectiveLr() const {
    return base_lr >= 0.0 ? base_lr : 0.2 * (2.0 * batch_pairs) / 512.0;
  }
  void Validate() const;
};

struct PretrainStep {
  int step = 0;
  int epoch = 0;
  double lr = 0.0;
  double loss = 0.0;
};

struct PretrainResult {
  Checkpoint checkpoint;
  std::vector<double> epoch_losses;  // epochs run in this call only
};

// Writes <out_dir>/checkpoint.bin at the configured cadence and at the end,
// and appends one CSV row per step to <out_dir>/loss.csv. When `resume` is
// set and a checkpoint exists, training continues from it and rows past the
// checkpoint are dropped from the log first.
PretrainResult Pretrain(const PretrainConfig& config, const RecordingPool& pool,
                        const std::filesystem::path& out_dir, bool resume,
                        const std::function<void(const PretrainStep&)>& on_step =
                            nullptr);

}  // namespace spatialcl

#endif  // SPATIALCL_PRETRAIN_H_
