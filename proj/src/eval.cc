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

#include "spatialcl/eval.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iterator>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>
#include <sstream>
#include <tuple>

#include "json.hpp"
#include "spatialcl/augment.h"
#include "spatialcl/errors.h"

namespace spatialcl {
namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;
constexpr int kInferenceChunk = 64;

constexpr uint64_t kHeadInitKey = 11;
constexpr uint64_t kEpochKey = 2000;

constexpr uint32_t kHeadGroups =
    GroupBit(ParamGroup::kClassifier) | GroupBit(ParamGroup::kLocalizer);

template <typename F>
void ParallelFor(int n, F&& body) {
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

Batch<float> Pack(const std::vector<FeatureStack>& stacks) {
  const FeatureStack& s0 = stacks.front();
  Batch<float> b(static_cast<int>(stacks.size()), s0.num_channels, s0.num_bins,
                 s0.num_frames);
  for (size_t i = 0; i < stacks.size(); ++i) {
    std::copy(stacks[i].data.begin(), stacks[i].data.end(), b.sample(i));
  }
  return b;
}

// Embeddings for a list of stacks, in chunks to bound tape memory.
std::vector<float> Embed(const Network<float>& net,
                         const std::vector<FeatureStack>& stacks) {
  const int e = net.config.embedding_dim;
  std::vector<float> out(stacks.size() * e);
  for (size_t s = 0; s < stacks.size(); s += kInferenceChunk) {
    const size_t end = std::min(stacks.size(), s + kInferenceChunk);
    const std::vector<FeatureStack> chunk(stacks.begin() + s, stacks.begin() + end);
    std::vector<float> h;
    EncoderForward(net, Pack(chunk), &h, nullptr);
    std::copy(h.begin(), h.end(), out.begin() + s * e);
  }
  return out;
}

// Softmax cross entropy plus squared error on the direction vector, both
// averaged over the batch. Writes the output gradients.
double HeadLoss(int n, int k, const std::vector<float>& logits,
                const std::vector<float>& dir, const std::vector<int>& labels,
                const std::vector<double>& azimuths, std::vector<float>* dlogits,
                std::vector<float>* ddir) {
  dlogits->assign(logits.size(), 0.0f);
  ddir->assign(dir.size(), 0.0f);
  double loss = 0.0;
  for (int i = 0; i < n; ++i) {
    const float* li = logits.data() + i * k;
    const double mx = *std::max_element(li, li + k);
    double denom = 0.0;
    for (int c = 0; c < k; ++c) denom += std::exp(li[c] - mx);
    loss += (mx + std::log(denom) - li[labels[i]]) / n;
    for (int c = 0; c < k; ++c) {
      (*dlogits)[i * k + c] = static_cast<float>(
          (std::exp(li[c] - mx) / denom - (c == labels[i] ? 1.0 : 0.0)) / n);
    }
    const double rad = azimuths[i] / kRadToDeg;
    const double tc = std::cos(rad), ts = std::sin(rad);
    const double ec = dir[2 * i] - tc, es = dir[2 * i + 1] - ts;
    loss += (ec * ec + es * es) / n;
    (*ddir)[2 * i] = static_cast<float>(2.0 * ec / n);
    (*ddir)[2 * i + 1] = static_cast<float>(2.0 * es / n);
  }
  return loss;
}

struct HeadMetrics {
  double accuracy = 0.0;
  double error = 0.0;
};

HeadMetrics ScoreHeads(const Network<float>& net, const std::vector<float>& h,
                       const LabeledSet& set) {
  const int n = static_cast<int>(set.size());
  if (n == 0) return {};
  std::vector<float> logits, dir;
  HeadsForward(net, n, h.data(), &logits, &dir);
  const int k = net.config.num_classes;
  HeadMetrics m;
  for (int i = 0; i < n; ++i) {
    const float* li = logits.data() + i * k;
    const int pred = static_cast<int>(std::max_element(li, li + k) - li);
    m.accuracy += (pred == set.labels[i]) * 100.0 / n;
    m.error += AngularError(dir[2 * i], dir[2 * i + 1], set.azimuths[i]) / n;
  }
  return m;
}

void CopyParams(const Network<float>& from, Network<float>* to,
                std::initializer_list<int> indices) {
  for (int i : indices) to->params[i].value = from.params[i].value;
}

// Per-dimension centring and scaling of embeddings, fitted on the training
// set. The std is floored at `min_std`, so a floor of 1 only ever shrinks.
// Heads train on scaled inputs and are folded back into plain linear heads on
// raw embeddings at the end.
struct EmbeddingScaler {
  std::vector<float> mean;
  std::vector<float> inv_std;

  static EmbeddingScaler Fit(const std::vector<float>& h, int dim,
                             double min_std) {
    const size_t n = h.size() / dim;
    std::vector<double> sum(dim, 0.0), sq(dim, 0.0);
    for (size_t i = 0; i < n; ++i) {
      for (int j = 0; j < dim; ++j) sum[j] += h[i * dim + j];
    }
    EmbeddingScaler s;
    s.mean.resize(dim);
    s.inv_std.resize(dim);
    for (int j = 0; j < dim; ++j) s.mean[j] = static_cast<float>(sum[j] / n);
    for (size_t i = 0; i < n; ++i) {
      for (int j = 0; j < dim; ++j) {
        const double d = h[i * dim + j] - s.mean[j];
        sq[j] += d * d;
      }
    }
    for (int j = 0; j < dim; ++j) {
      s.inv_std[j] = static_cast<float>(1.0 / std::max(std::sqrt(sq[j] / n), min_std));
    }
    return s;
  }

  static EmbeddingScaler Identity(int dim) {
    return {std::vector<float>(dim, 0.0f), std::vector<float>(dim, 1.0f)};
  }

  std::vector<float> Apply(std::vector<float> h) const {
    const size_t dim = mean.size();
    for (size_t i = 0; i < h.size(); ++i) {
      h[i] = (h[i] - mean[i % dim]) * inv_std[i % dim];
    }
    return h;
  }

  void ScaleGrad(std::vector<float>* dh) const {
    const size_t dim = mean.size();
    for (size_t i = 0; i < dh->size(); ++i) (*dh)[i] *= inv_std[i % dim];
  }

  // W~ (x - m) / s + b~ == (W~ / s) x + (b~ - W~ m / s).
  void Fold(Network<float>* net) const {
    const int dim = static_cast<int>(mean.size());
    for (auto [wi, bi] : {std::pair{kClassW, kClassB}, std::pair{kLocW, kLocB}}) {
      std::vector<float>& w = net->params[wi].value;
      std::vector<float>& b = net->params[bi].value;
      for (size_t o = 0; o < b.size(); ++o) {
        double shift = 0.0;
        for (int j = 0; j < dim; ++j) {
          float& wj = w[o * dim + j];
          wj *= inv_std[j];
          shift += static_cast<double>(wj) * mean[j];
        }
        b[o] = static_cast<float>(b[o] - shift);
      }
    }
  }
};

std::vector<std::vector<size_t>> IndicesByClass(const Manifest& m) {
  std::map<int, std::vector<size_t>> by_class;
  for (size_t i = 0; i < m.size(); ++i) {
    by_class[m.entries[i].class_label].push_back(i);
  }
  std::vector<std::vector<size_t>> out;
  for (auto& [label, idx] : by_class) out.push_back(std::move(idx));
  return out;
}

// Stratified sample of `count` indices, in manifest order.
std::vector<size_t> StratifiedSample(const Manifest& manifest, int count,
                                     RngStream& rng) {
  const auto classes = IndicesByClass(manifest);
  const double total = static_cast<double>(manifest.size());
  std::vector<int> quota(classes.size());
  std::vector<std::pair<double, size_t>> remainders;
  int assigned = 0;
  for (size_t c = 0; c < classes.size(); ++c) {
    const double exact = count * classes[c].size() / total;
    quota[c] = static_cast<int>(std::floor(exact));
    assigned += quota[c];
    remainders.push_back({exact - quota[c], c});
  }
  // Largest remainder first; ties go to the lower class id.
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (size_t r = 0; assigned < count && r < remainders.size(); ++r) {
    ++quota[remainders[r].second];
    ++assigned;
  }
  std::vector<size_t> picked;
  for (size_t c = 0; c < classes.size(); ++c) {
    std::vector<size_t> idx = classes[c];
    rng.Shuffle(std::span<size_t>(idx));
    picked.insert(picked.end(), idx.begin(), idx.begin() + quota[c]);
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

Manifest Pick(const Manifest& m, const std::vector<size_t>& idx) {
  Manifest out;
  out.directory = m.directory;
  for (size_t i : idx) out.entries.push_back(m.entries[i]);
  return out;
}

}  // namespace

double AngularError(double cos_pred, double sin_pred, double label_deg) {
  if (cos_pred == 0.0 && sin_pred == 0.0) return 90.0;
  const double pred = std::atan2(sin_pred, cos_pred) * kRadToDeg;
  return std::abs(WrapDegrees(pred - label_deg));
}

LabeledSet LoadLabeledSet(const Manifest& manifest) {
  LabeledSet set;
  const size_t n = manifest.size();
  set.patches.resize(n);
  set.labels.resize(n);
  set.azimuths.resize(n);
  ParallelFor(static_cast<int>(n), [&](int i) {
    const ManifestEntry& e = manifest.entries[i];
    const MultiChannelWaveform w = LoadRecording(manifest, e);
    const int64_t offset = (NumCropOffsets(w) - 1) / 2;
    set.patches[i] = CropWindow(w, offset, w.sample_rate());
    set.labels[i] = e.class_label;
    set.azimuths[i] = e.azimuth_deg;
  });
  return set;
}

std::vector<FeatureStack> ExtractLabeledStacks(const LabeledSet& set,
                                               const FeatureConfig& features,
                                               const FeatureStats& stats,
                                               int arrangement) {
  std::vector<FeatureStack> out(set.size());
  const ChannelSwapArrangement& a = AllArrangements()[arrangement];
  ParallelFor(static_cast<int>(set.size()), [&](int i) {
    out[i] = arrangement == 0
                 ? ExtractStack(set.patches[i], features)
                 : ExtractStack(ChannelSwap(set.patches[i], a), features);
    stats.Apply(out[i]);
  });
  return out;
}

TrainedModel TrainHeads(const EvalProtocol& protocol,
                        const Network<float>& encoder,
                        const FeatureStats& stats, const LabeledSet& train,
                        const LabeledSet& val, const FeatureConfig& features) {
  const int k = protocol.num_classes;
  if (k < 1) throw Error(ErrorKind::kConfig, "num_classes must be positive");
  if (train.size() == 0) throw Error(ErrorKind::kData, "empty training set");
  if (protocol.batch_size < 1 || protocol.epochs < 0) {
    throw Error(ErrorKind::kConfig, "invalid batch size or epoch count");
  }
  for (const LabeledSet* s : {&train, &val}) {
    for (int label : s->labels) {
      if (label < 0 || label >= k) {
        throw Error(ErrorKind::kData, "class label " + std::to_string(label) +
                                          " outside [0, " + std::to_string(k) +
                                          ")");
      }
    }
  }
  NetworkConfig cfg = encoder.config;
  cfg.num_classes = k;
  TrainedModel model;
  model.network = Network<float>::Initialize(cfg, MixSeed(protocol.seed, kHeadInitKey));
  for (int i = 0; i <= kProj2B; ++i) {
    model.network.params[i].value = encoder.params[i].value;
  }
  Network<float>& net = model.network;

  const bool probe = protocol.mode == EvalMode::kLinearProbe;
  const double grad_scale = probe ? 0.0 : protocol.EffectiveGradScale();
  const bool train_encoder = grad_scale > 0.0;
  const int num_arr = protocol.channel_swap ? kNumArrangements : 1;
  const int n = static_cast<int>(train.size());
  const int e = cfg.embedding_dim;

  // Linear probing works from embeddings of every arrangement, computed once.
  std::vector<std::vector<float>> train_h;
  if (!train_encoder) {
    for (int a = 0; a < num_arr; ++a) {
      train_h.push_back(
          Embed(net, ExtractLabeledStacks(train, features, stats, a)));
    }
  }
  const std::vector<FeatureStack> val_stacks =
      ExtractLabeledStacks(val, features, stats, 0);
  // A trained encoder moves under the heads, so its scaler is fitted on the
  // initial embeddings and never amplifies a dimension.
  EmbeddingScaler scaler = EmbeddingScaler::Identity(e);
  if (protocol.standardize_embeddings) {
    scaler = train_encoder
                 ? EmbeddingScaler::Fit(
                       Embed(net, ExtractLabeledStacks(train, features, stats, 0)),
                       e, 1.0)
                 : EmbeddingScaler::Fit(train_h[0], e, 1e-3);
  }

  OptimizerState<float> opt = OptimizerState<float>::Zeros(net.params, protocol.sgd);
  opt.config.group_decay_scale[static_cast<int>(ParamGroup::kEncoder)] = grad_scale;
  const uint32_t groups =
      kHeadGroups | (train_encoder ? GroupBit(ParamGroup::kEncoder) : 0u);
  const LrSchedule schedule{protocol.lr, protocol.warmup_epochs, protocol.epochs};

  double best_acc = -1.0, best_err = 1e9, best_score = -1e9;
  Network<float> best = net;
  ParamList<float> grads = ZerosLike(net.params);
  EncoderTape<float> tape;
  for (int epoch = 0; epoch < protocol.epochs; ++epoch) {
    RngStream rng(MixSeed(protocol.seed, kEpochKey + epoch));
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    rng.Shuffle(std::span<int>(order));
    std::vector<int> arr(n, 0);
    if (num_arr > 1) {
      for (int i = 0; i < n; ++i) arr[i] = static_cast<int>(rng.UniformInt(num_arr));
    }
    const double lr = LrAt(epoch, schedule);
    double loss_sum = 0.0;
    for (int b0 = 0; b0 < n; b0 += protocol.batch_size) {
      const int bn = std::min(protocol.batch_size, n - b0);
      std::vector<int> labels(bn);
      std::vector<double> az(bn);
      for (int j = 0; j < bn; ++j) {
        const int item = order[b0 + j];
        labels[j] = train.labels[item];
        az[j] = TransformAzimuth(AllArrangements()[arr[b0 + j]],
                                 train.azimuths[item]);
      }
      std::vector<float> h(static_cast<size_t>(bn) * e);
      if (train_encoder) {
        std::vector<FeatureStack> stacks(bn);
        ParallelFor(bn, [&](int j) {
          const int item = order[b0 + j];
          stacks[j] = ExtractStack(
              arr[b0 + j] == 0
                  ? train.patches[item]
                  : ChannelSwap(train.patches[item], AllArrangements()[arr[b0 + j]]),
              features);
          stats.Apply(stacks[j]);
        });
        EncoderForward(net, Pack(stacks), &h, &tape);
      } else {
        for (int j = 0; j < bn; ++j) {
          const float* src = train_h[arr[b0 + j]].data() +
                             static_cast<size_t>(order[b0 + j]) * e;
          std::copy(src, src + e, h.begin() + static_cast<size_t>(j) * e);
        }
      }
      h = scaler.Apply(std::move(h));
      std::vector<float> logits, dir, dlogits, ddir, dh;
      HeadsForward(net, bn, h.data(), &logits, &dir);
      loss_sum += HeadLoss(bn, k, logits, dir, labels, az, &dlogits, &ddir) * bn;
      HeadsBackward(net, bn, h.data(), dlogits, ddir, &grads,
                    train_encoder ? &dh : nullptr);
      if (train_encoder) {
        scaler.ScaleGrad(&dh);
        EncoderBackward(net, tape, dh, &grads, nullptr);
        GradScale(&grads, ParamGroup::kEncoder, grad_scale);
      }
      SgdStep(&net.params, grads, &opt, lr, groups);
    }
    EpochMetrics m;
    m.epoch = epoch;
    m.train_loss = loss_sum / n;
    if (val.size() > 0) {
      const HeadMetrics v =
          ScoreHeads(net, scaler.Apply(Embed(net, val_stacks)), val);
      m.val_accuracy = v.accuracy;
      m.val_error_deg = v.error;
    }
    model.history.push_back(m);
    if (!protocol.select_best || val.size() == 0) continue;
    if (probe) {
      if (m.val_accuracy > best_acc) {
        best_acc = m.val_accuracy;
        model.class_epoch = epoch;
        CopyParams(net, &best, {kClassW, kClassB});
      }
      if (m.val_error_deg < best_err) {
        best_err = m.val_error_deg;
        model.loc_epoch = epoch;
        CopyParams(net, &best, {kLocW, kLocB});
      }
    } else {
      const double score = m.val_accuracy / 100.0 - m.val_error_deg / 180.0;
      if (score > best_score) {
        best_score = score;
        model.class_epoch = model.loc_epoch = epoch;
        best = net;
      }
    }
  }
  if (protocol.select_best && val.size() > 0 && protocol.epochs > 0) {
    net = std::move(best);
  } else {
    model.class_epoch = model.loc_epoch = protocol.epochs - 1;
  }
  scaler.Fold(&net);
  return model;
}

EvalReport Evaluate(const Network<float>& network, const FeatureStats& stats,
                    const LabeledSet& test, const FeatureConfig& features,
                    std::vector<ItemPrediction>* items) {
  if (test.size() == 0) throw Error(ErrorKind::kData, "empty test set");
  const int k = network.config.num_classes;
  const std::vector<float> h =
      Embed(network, ExtractLabeledStacks(test, features, stats, 0));
  std::vector<float> logits, dir;
  HeadsForward(network, static_cast<int>(test.size()), h.data(), &logits, &dir);
  std::vector<ItemPrediction> preds(test.size());
  for (size_t i = 0; i < test.size(); ++i) {
    ItemPrediction& p = preds[i];
    const float* li = logits.data() + i * k;
    p.label = test.labels[i];
    p.predicted = static_cast<int>(std::max_element(li, li + k) - li);
    p.azimuth_deg = test.azimuths[i];
    p.cos_pred = dir[2 * i];
    p.sin_pred = dir[2 * i + 1];
    p.error_deg = AngularError(p.cos_pred, p.sin_pred, p.azimuth_deg);
  }
  EvalReport report = SummarizePredictions(preds);
  if (items != nullptr) *items = std::move(preds);
  return report;
}

EvalReport SummarizePredictions(const std::vector<ItemPrediction>& items) {
  if (items.empty()) throw Error(ErrorKind::kData, "no predictions");
  EvalReport r;
  int correct = 0;
  double err = 0.0;
  for (const ItemPrediction& p : items) {
    correct += p.predicted == p.label;
    err += p.error_deg;
  }
  r.num_test = static_cast<int>(items.size());
  r.accuracy_percent = 100.0 * correct / r.num_test;
  r.azimuth_error_deg = err / r.num_test;
  return r;
}

Manifest SubsetSelect(const Manifest& manifest, int count, RngStream& rng) {
  if (count < 0 || static_cast<size_t>(count) > manifest.size()) {
    throw Error(ErrorKind::kConfig,
                "requested " + std::to_string(count) + " clips but only " +
                    std::to_string(manifest.size()) + " are available");
  }
  return Pick(manifest, StratifiedSample(manifest, count, rng));
}

Manifest SubsetSelectHours(const Manifest& manifest, double hours,
                           double clip_seconds, RngStream& rng) {
  if (!(hours >= 0.0) || !(clip_seconds > 0.0)) {
    throw Error(ErrorKind::kConfig, "invalid subset duration");
  }
  const double available = manifest.size() * clip_seconds / 3600.0;
  if (hours > available + 1e-9) {
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "requested %.4g h of labeled data but only %.4g h available",
                  hours, available);
    throw Error(ErrorKind::kConfig, buf);
  }
  const int count = static_cast<int>(std::lround(hours * 3600.0 / clip_seconds));
  return SubsetSelect(manifest, std::min<int>(count, manifest.size()), rng);
}

Manifest SubsetSelectFraction(const Manifest& manifest, double fraction,
                              RngStream& rng) {
  if (!(fraction > 0.0) || fraction > 1.0) {
    throw Error(ErrorKind::kConfig, "subset fraction must be in (0, 1]");
  }
  if (fraction == 1.0) return manifest;
  return SubsetSelect(
      manifest, static_cast<int>(std::lround(fraction * manifest.size())), rng);
}

std::pair<Manifest, Manifest> SplitValidation(const Manifest& manifest,
                                              double val_fraction,
                                              RngStream& rng) {
  if (!(val_fraction >= 0.0) || val_fraction >= 1.0) {
    throw Error(ErrorKind::kConfig, "validation fraction must be in [0, 1)");
  }
  const int count = static_cast<int>(std::lround(val_fraction * manifest.size()));
  const std::vector<size_t> val = StratifiedSample(manifest, count, rng);
  std::vector<size_t> train;
  size_t v = 0;
  for (size_t i = 0; i < manifest.size(); ++i) {
    if (v < val.size() && val[v] == i) {
      ++v;
    } else {
      train.push_back(i);
    }
  }
  return {Pick(manifest, train), Pick(manifest, val)};
}

void WriteReportJson(const EvalReport& r, const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  j["name"] = r.name;
  j["protocol"] = r.protocol;
  j["encoder_init"] = r.encoder_init;
  j["accuracy_percent"] = r.accuracy_percent;
  j["azimuth_error_deg"] = r.azimuth_error_deg;
  j["error_statistic"] = r.error_statistic;
  j["labeled_hours"] = r.labeled_hours;
  j["num_test"] = r.num_test;
  j["seed"] = r.seed;
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

EvalReport ReadReportJson(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open report " + path.string());
  try {
    const auto j = nlohmann::json::parse(in);
    EvalReport r;
    r.name = j.value("name", "");
    r.protocol = j.at("protocol").get<std::string>();
    r.encoder_init = j.at("encoder_init").get<std::string>();
    r.accuracy_percent = j.at("accuracy_percent").get<double>();
    r.azimuth_error_deg = j.at("azimuth_error_deg").get<double>();
    r.error_statistic = j.value("error_statistic", "mean");
    r.labeled_hours = j.value("labeled_hours", 0.0);
    r.num_test = j.value("num_test", 0);
    r.seed = j.value("seed", uint64_t{0});
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kData, path.string() + ": " + e.what());
  }
}

void WritePredictionsCsv(const std::vector<ItemPrediction>& items,
                         const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out << "index,label,predicted,azimuth_deg,cos_pred,sin_pred,error_deg\n";
  char row[256];
  for (size_t i = 0; i < items.size(); ++i) {
    const ItemPrediction& p = items[i];
    std::snprintf(row, sizeof(row), "%zu,%d,%d,%.17g,%.9g,%.9g,%.17g\n", i,
                  p.label, p.predicted, p.azimuth_deg, p.cos_pred, p.sin_pred,
                  p.error_deg);
    out << row;
  }
}

std::string RenderMarkdownTable(const std::vector<EvalReport>& reports) {
  std::ostringstream out;
  out << "| Method | Protocol | Encoder | Labeled (h) | Accuracy% | Error° |\n"
      << "|---|---|---|---:|---:|---:|\n";
  char row[512];
  for (const EvalReport& r : reports) {
    std::snprintf(row, sizeof(row), "| %s | %s | %s | %.3f | %.1f | %.1f |\n",
                  r.name.empty() ? "-" : r.name.c_str(), r.protocol.c_str(),
                  r.encoder_init.c_str(), r.labeled_hours, r.accuracy_percent,
                  r.azimuth_error_deg);
    out << row;
  }
  out << "\nAzimuth error is the " << (reports.empty() ? "mean" : reports[0].error_statistic)
      << " absolute angular error over the test set.\n";
  return out.str();
}

std::string RenderReportCsv(const std::vector<EvalReport>& reports) {
  std::ostringstream out;
  out << "name,protocol,encoder_init,labeled_hours,accuracy_percent,"
         "azimuth_error_deg,error_statistic,num_test,seed\n";
  char row[512];
  for (const EvalReport& r : reports) {
    std::snprintf(row, sizeof(row), "%s,%s,%s,%.6g,%.6f,%.6f,%s,%d,%llu\n",
                  r.name.c_str(), r.protocol.c_str(), r.encoder_init.c_str(),
                  r.labeled_hours, r.accuracy_percent, r.azimuth_error_deg,
                  r.error_statistic.c_str(), r.num_test,
                  static_cast<unsigned long long>(r.seed));
    out << row;
  }
  return out.str();
}

std::string RenderCurveCsv(const std::vector<EvalReport>& reports) {
  using Key = std::tuple<std::string, std::string, std::string, double>;
  struct Acc {
    double acc = 0.0, err = 0.0;
    int n = 0;
  };
  std::map<Key, Acc> groups;
  for (const EvalReport& r : reports) {
    Acc& a = groups[{r.name, r.protocol, r.encoder_init, r.labeled_hours}];
    a.acc += r.accuracy_percent;
    a.err += r.azimuth_error_deg;
    ++a.n;
  }
  std::vector<std::pair<Key, Acc>> rows(groups.begin(), groups.end());
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return std::get<3>(a.first) < std::get<3>(b.first);
  });
  std::ostringstream out;
  out << "name,protocol,encoder_init,labeled_hours,accuracy_percent,"
         "azimuth_error_deg,runs\n";
  char row[512];
  for (const auto& [key, a] : rows) {
    std::snprintf(row, sizeof(row), "%s,%s,%s,%.6g,%.6f,%.6f,%d\n",
                  std::get<0>(key).c_str(), std::get<1>(key).c_str(),
                  std::get<2>(key).c_str(), std::get<3>(key), a.acc / a.n,
                  a.err / a.n, a.n);
    out << row;
  }
  return out.str();
}

}  // namespace spatialcl
