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

#include "spatialcl/pretrain.h"

#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <numeric>
#include <string>

#include "spatialcl/errors.h"

namespace spatialcl {
namespace {

namespace fs = std::filesystem;

// Keys for the independent streams derived from the run seed.
constexpr uint64_t kInitKey = 1;
constexpr uint64_t kStatsKey = 2;
constexpr uint64_t kEpochKey = 1000;

constexpr uint32_t kPretrainGroups =
    GroupBit(ParamGroup::kEncoder) | GroupBit(ParamGroup::kProjector);

void RunParallel(int n, const std::function<void(int)>& body) {
  std::exception_ptr failure;
  std::mutex mu;
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(mu);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

// Drops log rows whose epoch is at or past `epochs_done`.
void TruncateLog(const fs::path& path, int epochs_done) {
  std::vector<std::string> kept;
  {
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) {
      if (kept.empty()) {
        kept.push_back(line);
        continue;
      }
      const size_t comma = line.find(',');
      if (comma == std::string::npos) continue;
      if (std::stoi(line.substr(comma + 1)) < epochs_done) kept.push_back(line);
    }
  }
  std::ofstream out(path, std::ios::trunc);
  if (kept.empty()) kept.push_back("step,epoch,lr,loss");
  for (const std::string& line : kept) out << line << '\n';
}

}  // namespace

RecordingPool::RecordingPool(Manifest manifest, size_t cache_bytes)
    : manifest_(std::move(manifest)) {
  uintmax_t total = 0;
  for (const ManifestEntry& e : manifest_.entries) {
    std::error_code ec;
    const uintmax_t bytes = fs::file_size(manifest_.Resolve(e), ec);
    if (ec) {
      throw Error(ErrorKind::kIo,
                  "missing recording " + manifest_.Resolve(e).string());
    }
    total += bytes;
  }
  if (total > cache_bytes || manifest_.empty()) return;
  cache_.resize(manifest_.size());
  RunParallel(static_cast<int>(manifest_.size()), [&](int i) {
    const MultiChannelWaveform w = LoadRecording(manifest_, manifest_.entries[i]);
    Cached& c = cache_[i];
    c.channels = w.num_channels();
    c.samples = w.num_samples();
    c.data.assign(w.data().begin(), w.data().end());
  });
}

MultiChannelWaveform RecordingPool::Load(size_t index) const {
  if (index >= manifest_.size()) {
    throw Error(ErrorKind::kSize, "recording index out of range");
  }
  if (cache_.empty()) return LoadRecording(manifest_, manifest_.entries[index]);
  const Cached& c = cache_[index];
  MultiChannelWaveform w(c.channels, c.samples, kWorkingSampleRate);
  std::copy(c.data.begin(), c.data.end(), w.data().begin());
  return w;
}

MultiChannelWaveform PoolBackground::Draw(uint64_t exclude_source_id,
                                          RngStream& rng) const {
  const size_t n = pool_->size();
  if (n < 2) {
    throw Error(ErrorKind::kConfig, "Mixup needs at least two recordings");
  }
  size_t index = rng.UniformInt(n - 1);
  if (exclude_source_id < n && index >= exclude_source_id) ++index;
  const MultiChannelWaveform w = pool_->Load(index);
  const int64_t offset = static_cast<int64_t>(
      rng.UniformInt(static_cast<uint64_t>(NumCropOffsets(w))));
  return CropWindow(w, offset, w.sample_rate());
}

PairBatch AssembleBatch(const RecordingPool& pool,
                        std::span<const size_t> recordings,
                        const AugmentationPlan& plan,
                        const FeatureConfig& features,
                        const FeatureStats& stats, RngStream& rng) {
  const int n = static_cast<int>(recordings.size());
  if (n < 1) throw Error(ErrorKind::kConfig, "empty batch");
  const uint64_t key = rng.NextU64();
  const PoolBackground background(&pool);
  std::vector<AugmentedPair> pairs(n);
  RunParallel(n, [&](int m) {
    RngStream pair_rng(MixSeed(key, static_cast<uint64_t>(m)));
    const MultiChannelWaveform w = pool.Load(recordings[m]);
    const auto patches = CropPair(w, recordings[m], pair_rng);
    pairs[m] = ApplyPlan(patches, plan.mixup ? &background : nullptr, plan,
                         features, stats, pair_rng);
  });
  const FeatureStack& first = pairs[0].first;
  PairBatch out;
  out.stacks = Batch<float>(2 * n, first.num_channels, first.num_bins,
                            first.num_frames);
  out.source_ids.resize(2 * n);
  for (int m = 0; m < n; ++m) {
    std::copy(pairs[m].first.data.begin(), pairs[m].first.data.end(),
              out.stacks.sample(2 * m));
    std::copy(pairs[m].second.data.begin(), pairs[m].second.data.end(),
              out.stacks.sample(2 * m + 1));
    out.source_ids[2 * m] = out.source_ids[2 * m + 1] = recordings[m];
  }
  return out;
}

PairBatch AssembleBatch(const RecordingPool& pool, int num_pairs,
                        const AugmentationPlan& plan,
                        const FeatureConfig& features,
                        const FeatureStats& stats, RngStream& rng) {
  if (pool.size() == 0) throw Error(ErrorKind::kConfig, "empty manifest");
  if (num_pairs < 1 || static_cast<size_t>(num_pairs) > pool.size()) {
    throw Error(ErrorKind::kConfig,
                "batch of " + std::to_string(num_pairs) + " pairs needs that many "
                "recordings; manifest has " + std::to_string(pool.size()));
  }
  std::vector<size_t> order(pool.size());
  std::iota(order.begin(), order.end(), size_t{0});
  // Partial Fisher-Yates: the first num_pairs entries are a uniform sample.
  for (int i = 0; i < num_pairs; ++i) {
    const size_t j = i + rng.UniformInt(order.size() - i);
    std::swap(order[i], order[j]);
  }
  order.resize(num_pairs);
  return AssembleBatch(pool, order, plan, features, stats, rng);
}

FeatureStats EstimateFeatureStats(const RecordingPool& pool,
                                  const FeatureConfig& features,
                                  int max_recordings, RngStream& rng) {
  if (pool.size() == 0) throw Error(ErrorKind::kData, "empty manifest");
  std::vector<size_t> order(pool.size());
  std::iota(order.begin(), order.end(), size_t{0});
  rng.Shuffle(std::span<size_t>(order));
  order.resize(std::min<size_t>(order.size(), std::max(1, max_recordings)));
  const uint64_t key = rng.NextU64();
  std::vector<FeatureStack> stacks(order.size());
  RunParallel(static_cast<int>(order.size()), [&](int i) {
    RngStream r(MixSeed(key, static_cast<uint64_t>(i)));
    const MultiChannelWaveform w = pool.Load(order[i]);
    const int64_t offset = static_cast<int64_t>(
        r.UniformInt(static_cast<uint64_t>(NumCropOffsets(w))));
    stacks[i] = ExtractStack(CropWindow(w, offset, w.sample_rate()), features);
  });
  return ComputeFeatureStats(stacks);
}

void PretrainConfig::Validate() const {
  if (batch_pairs < 2) throw Error(ErrorKind::kConfig, "batch_pairs must be >= 2");
  if (epochs < 0) throw Error(ErrorKind::kConfig, "epochs must be >= 0");
  if (warmup_epochs < 0) {
    throw Error(ErrorKind::kConfig, "warmup_epochs must be >= 0");
  }
  if (checkpoint_every < 1) {
    throw Error(ErrorKind::kConfig, "checkpoint_every must be >= 1");
  }
  if (!(ntxent.temperature > 0.0)) {
    throw Error(ErrorKind::kConfig, "temperature must be positive");
  }
  network.Validate();
  features.stft.Validate();
  features.mel.Validate(features.sample_rate);
}

PretrainResult Pretrain(const PretrainConfig& config, const RecordingPool& pool,
                        const fs::path& out_dir, bool resume,
                        const std::function<void(const PretrainStep&)>& on_step) {
  config.Validate();
  const int n = config.batch_pairs;
  if (pool.size() < static_cast<size_t>(n)) {
    throw Error(ErrorKind::kConfig,
                "batch of " + std::to_string(n) + " pairs needs that many "
                "recordings; manifest has " + std::to_string(pool.size()));
  }
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create " + out_dir.string());
  const fs::path ckpt_path = out_dir / "checkpoint.bin";
  const fs::path log_path = out_dir / "loss.csv";

  Checkpoint state;
  if (resume && fs::exists(ckpt_path)) {
    state = LoadCheckpoint(ckpt_path);
    if (state.seed != config.seed || !(state.network.config == config.network)) {
      throw Error(ErrorKind::kConfig,
                  "checkpoint " + ckpt_path.string() +
                      " was written by a run with a different seed or network");
    }
    if (state.epochs_done > config.epochs) {
      throw Error(ErrorKind::kConfig, "checkpoint is past the requested epochs");
    }
    if (state.optimizer.velocity.empty()) {
      state.optimizer.velocity = ZerosLike(state.network.params);
    }
    TruncateLog(log_path, state.epochs_done);
  } else {
    state.network =
        Network<float>::Initialize(config.network, MixSeed(config.seed, kInitKey));
    RngStream stats_rng(MixSeed(config.seed, kStatsKey));
    state.stats = EstimateFeatureStats(pool, config.features,
                                       config.stats_recordings, stats_rng);
    state.optimizer = OptimizerState<float>::Zeros(state.network.params);
    state.seed = config.seed;
    state.epochs_done = 0;
    std::ofstream(log_path, std::ios::trunc) << "step,epoch,lr,loss\n";
  }
  state.optimizer.config = config.sgd;
  if (state.stats.mean.size() != static_cast<size_t>(config.network.in_channels)) {
    throw Error(ErrorKind::kConfig,
                "feature channels do not match the network input channels");
  }

  const LrSchedule schedule{config.EffectiveLr(), config.warmup_epochs,
                            config.epochs};
  const int steps_per_epoch = static_cast<int>(pool.size() / n);
  const int pdim = config.network.projection_dim;
  std::ofstream log(log_path, std::ios::app);
  if (!log) throw Error(ErrorKind::kIo, "cannot write " + log_path.string());

  PretrainResult result;
  ParamList<float> grads = ZerosLike(state.network.params);
  EncoderTape<float> enc_tape;
  ProjectorTape<float> proj_tape;
  std::vector<float> h, z, dz, dh;
  for (int epoch = state.epochs_done; epoch < config.epochs; ++epoch) {
    RngStream epoch_rng(MixSeed(config.seed, kEpochKey + epoch));
    std::vector<size_t> order(pool.size());
    std::iota(order.begin(), order.end(), size_t{0});
    epoch_rng.Shuffle(std::span<size_t>(order));
    const double lr = LrAt(epoch, schedule);
    double loss_sum = 0.0;
    for (int b = 0; b < steps_per_epoch; ++b) {
      const int step = epoch * steps_per_epoch + b;
      const PairBatch batch =
          AssembleBatch(pool, std::span<const size_t>(order).subspan(b * n, n),
                        config.plan, config.features, state.stats, epoch_rng);
      EncoderForward(state.network, batch.stacks, &h, &enc_tape);
      ProjectorForward(state.network, 2 * n, h.data(), &z, &proj_tape);
      const double loss = NtXent(2 * n, pdim, z.data(), config.ntxent, &dz);
      if (!std::isfinite(loss)) {
        throw Error(ErrorKind::kNumeric,
                    "non-finite loss at epoch " + std::to_string(epoch) +
                        ", step " + std::to_string(step) +
                        "; last checkpoint kept at " + ckpt_path.string());
      }
      ProjectorBackward(state.network, proj_tape, dz, &grads, &dh);
      EncoderBackward(state.network, enc_tape, dh, &grads, nullptr);
      SgdStep(&state.network.params, grads, &state.optimizer, lr,
              kPretrainGroups);
      loss_sum += loss;
      char row[96];
      std::snprintf(row, sizeof(row), "%d,%d,%.9g,%.9g\n", step, epoch, lr, loss);
      log << row;
      if (on_step) on_step({step, epoch, lr, loss});
    }
    log.flush();
    result.epoch_losses.push_back(loss_sum / steps_per_epoch);
    state.epochs_done = epoch + 1;
    if (state.epochs_done % config.checkpoint_every == 0 &&
        state.epochs_done < config.epochs) {
      SaveCheckpoint(state, ckpt_path);
    }
  }
  SaveCheckpoint(state, ckpt_path);
  result.checkpoint = std::move(state);
  return result;
}

}  // namespace spatialcl
