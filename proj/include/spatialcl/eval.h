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

#ifndef SPATIALCL_EVAL_H_
#define SPATIALCL_EVAL_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "spatialcl/dataset.h"
#include "spatialcl/features.h"
#include "spatialcl/network.h"
#include "spatialcl/optimizer.h"
#include "spatialcl/rng.h"
#include "spatialcl/waveform.h"

namespace spatialcl {

// |wrap(atan2(s, c) - label)| in degrees, in [0, 180]. A (0, 0) prediction
// carries no direction and scores 90.
double AngularError(double cos_pred, double sin_pred, double label_deg);

// Labeled clips reduced to their centre one-second crops.
struct LabeledSet {
  std::vector<MultiChannelWaveform> patches;
  std::vector<int> labels;
  std::vector<double> azimuths;

  size_t size() const { return patches.size(); }
};

// Loads each recording and keeps its centre crop. Parallel over entries.
LabeledSet LoadLabeledSet(const Manifest& manifest);

// Feature stacks of every patch under one arrangement, standardized.
std::vector<FeatureStack> ExtractLabeledStacks(
    const LabeledSet& set, const FeatureConfig& features,
    const FeatureStats& stats, int arrangement = 0);

enum class EvalMode { kLinearProbe, kFineTune };

struct EvalProtocol {
  EvalMode mode = EvalMode::kLinearProbe;
  bool pretrained = true;
  double lr = 0.01;
  int batch_size = 128;
  int epochs = 100;
  int warmup_epochs = 10;
  SgdConfig sgd;
  // Negative: 0.1 for a pretrained encoder, 1.0 otherwise.
  double encoder_grad_scale = -1.0;
  bool channel_swap = true;
  // Keep the best validation epoch; otherwise keep the last.
  bool select_best = true;
  // Centre and scale embeddings before the heads (folded in afterwards).
  // Fine-tuning only scales down dimensions with std above 1.
  bool standardize_embeddings = true;
  int num_classes = 8;
  uint64_t seed = 0;

  double EffectiveGradScale() const {
    if (encoder_grad_scale >= 0.0) return encoder_grad_scale;
    return pretrained ? 0.1 : 1.0;
  }
};

struct EpochMetrics {
  int epoch = 0;
  double train_loss = 0.0;
  double val_accuracy = 0.0;
  double val_error_deg = 0.0;
};

struct TrainedModel {
  Network<float> network;
  std::vector<EpochMetrics> history;
  int class_epoch = -1;  // epoch whose classifier was kept
  int loc_epoch = -1;    // epoch whose localizer was kept
};

// Trains fresh heads on top of `encoder` (its heads are replaced). The heads
// see embeddings centred and scaled with training-set statistics, and the
// returned heads have that affine map folded in, so they act on raw
// embeddings. Throws kData when a label is outside
// [0, num_classes).
TrainedModel TrainHeads(const EvalProtocol& protocol,
                        const Network<float>& encoder,
                        const FeatureStats& stats, const LabeledSet& train,
                        const LabeledSet& val, const FeatureConfig& features);

struct ItemPrediction {
  int label = 0;
  int predicted = 0;
  double azimuth_deg = 0.0;
  double cos_pred = 0.0;
  double sin_pred = 0.0;
  double error_deg = 0.0;
};

struct EvalReport {
  std::string name;          // row label, e.g. "CS+CD"
  std::string protocol;      // linear_probe | finetune | subset_finetune
  std::string encoder_init;  // pretrained | random
  double accuracy_percent = 0.0;
  double azimuth_error_deg = 0.0;
  double labeled_hours = 0.0;
  int num_test = 0;
  uint64_t seed = 0;
  std::string error_statistic = "mean";
};

// Single deterministic pass over `test` with the identity arrangement.
// Throws kData on an empty set.
EvalReport Evaluate(const Network<float>& network, const FeatureStats& stats,
                    const LabeledSet& test, const FeatureConfig& features,
                    std::vector<ItemPrediction>* items = nullptr);

// Metrics recomputed from per-item predictions.
EvalReport SummarizePredictions(const std::vector<ItemPrediction>& items);

// Class-stratified random subset of `count` clips; per-class counts follow
// the class proportions by largest remainder. Entries keep manifest order.
// Throws kConfig when count exceeds the manifest.
Manifest SubsetSelect(const Manifest& manifest, int count, RngStream& rng);
// Clip count nearest to hours * 3600 / clip_seconds.
Manifest SubsetSelectHours(const Manifest& manifest, double hours,
                           double clip_seconds, RngStream& rng);
// fraction = 1 returns the manifest unchanged.
Manifest SubsetSelectFraction(const Manifest& manifest, double fraction,
                              RngStream& rng);

// Stratified validation hold-out: returns {train, val}.
std::pair<Manifest, Manifest> SplitValidation(const Manifest& manifest,
                                              double val_fraction,
                                              RngStream& rng);

void WriteReportJson(const EvalReport& report, const std::filesystem::path& path);
EvalReport ReadReportJson(const std::filesystem::path& path);
void WritePredictionsCsv(const std::vector<ItemPrediction>& items,
                         const std::filesystem::path& path);

// Table with Accuracy% and Error° columns, one row per report.
std::string RenderMarkdownTable(const std::vector<EvalReport>& reports);
std::string RenderReportCsv(const std::vector<EvalReport>& reports);
// Labeled-data curves: one row per (name, protocol, init, hours), averaged
// over seeds, sorted by hours.
std::string RenderCurveCsv(const std::vector<EvalReport>& reports);

}  // namespace spatialcl

#endif  // SPATIALCL_EVAL_H_
