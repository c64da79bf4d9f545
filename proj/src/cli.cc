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


#include "spatialcl/cli.h"

#include <omp.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "CLI11.hpp"
#include "spatialcl/checkpoint.h"
#include "spatialcl/errors.h"
#include "spatialcl/rng.h"

namespace spatialcl {
namespace {

namespace fs = std::filesystem;

constexpr uint64_t kSplitKey = 31;
constexpr uint64_t kRandomInitKey = 32;

Error ConfigError(const std::string& msg) { return Error(ErrorKind::kConfig, msg); }

std::string Lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

template <typename T>
T ParseNumber(const std::string& key, const std::string& text) {
  T value{};
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || text.empty()) {
    throw ConfigError("setting " + key + ": cannot parse '" + text + "'");
  }
  return value;
}

}  // namespace

const std::map<std::string, std::string>& KnownSettings() {
  static const auto* known = new std::map<std::string, std::string>{
      {"dataset.out_dir", "output directory of `simulate`"},
      {"dataset.num_scenes", "scenes to simulate"},
      {"dataset.split", "split name; pretrain, train, val and test get disjoint seed ranges"},
      {"dataset.classes", "number of synthetic source classes (<= 20)"},
      {"dataset.clip_seconds", "source clip length in seconds"},
      {"dataset.source_dir", "directory of per-class WAV folders; empty for synthetic sources"},
      {"features.fft_size", "STFT size in samples"},
      {"features.hop_size", "STFT hop in samples"},
      {"features.num_mels", "Mel bands, also the number of GCC lags"},
      {"features.f_min", "lowest Mel edge in Hz"},
      {"features.f_max", "highest Mel edge in Hz"},
      {"features.num_frames", "frames kept per one-second patch"},
      {"augment.channel_swap", "enable ChannelSwap"},
      {"augment.mixup", "enable Mixup"},
      {"augment.random_resized_crop", "enable RandomResizedCrop"},
      {"augment.channel_drop", "enable ChannelDrop"},
      {"augment.mixup_alpha_lo", "Mixup alpha lower bound"},
      {"augment.mixup_alpha_hi", "Mixup alpha upper bound"},
      {"augment.rrc_scale_lo", "crop area fraction lower bound"},
      {"augment.rrc_scale_hi", "crop area fraction upper bound"},
      {"augment.rrc_aspect_lo", "crop aspect ratio lower bound"},
      {"augment.rrc_aspect_hi", "crop aspect ratio upper bound"},
      {"augment.drop_probability", "ChannelDrop probability per channel"},
      {"pretrain.manifest", "manifest of the unlabeled pre-training split"},
      {"pretrain.out_dir", "directory for checkpoint.bin and loss.csv"},
      {"pretrain.batch_pairs", "positive pairs per batch (N)"},
      {"pretrain.epochs", "training epochs"},
      {"pretrain.base_lr", "peak learning rate; negative means 0.2 * 2N / 512"},
      {"pretrain.warmup_epochs", "linear warmup epochs"},
      {"pretrain.momentum", "SGD momentum"},
      {"pretrain.weight_decay", "SGD weight decay"},
      {"pretrain.temperature", "NT-Xent temperature"},
      {"pretrain.checkpoint_every", "epochs between checkpoints"},
      {"pretrain.stats_recordings", "recordings used for feature standardization"},
      {"pretrain.cache_mb", "in-memory recording cache limit in MiB"},
      {"pretrain.log_every", "steps between progress lines"},
      {"eval.train_manifest", "labeled training manifest"},
      {"eval.test_manifest", "labeled test manifest"},
      {"eval.checkpoint", "pre-trained checkpoint; empty for a random encoder"},
      {"eval.out_dir", "directory for report.json and friends"},
      {"eval.name", "row label in reports"},
      {"eval.num_classes", "number of classes"},
      {"eval.lr", "head learning rate"},
      {"eval.batch_size", "batch size"},
      {"eval.epochs", "training epochs"},
      {"eval.warmup_epochs", "linear warmup epochs"},
      {"eval.momentum", "SGD momentum"},
      {"eval.weight_decay", "SGD weight decay"},
      {"eval.encoder_grad_scale", "encoder gradient scale; negative means 0.1 pretrained, 1 random"},
      {"eval.channel_swap", "ChannelSwap during head training"},
      {"eval.select_best", "keep the best validation epoch"},
      {"eval.standardize_embeddings", "standardize embeddings before the heads"},
      {"eval.val_fraction", "fraction of labeled clips held out for validation"},
      {"eval.subset_hours", "labeled hours for subset fine-tuning; 0 uses all"},
      {"eval.subset_fraction", "labeled fraction for subset fine-tuning"},
  };
  return *known;
}

RunSettings RunSettings::FromFile(const fs::path& path) {
  if (!fs::is_regular_file(path)) {
    throw ConfigError("config file not found: " + path.string());
  }
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(path.string(), tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("cannot parse config file " + path.string() + ": " +
                      e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  RunSettings settings;
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      throw ConfigError(path.string() + ": key '" + section +
                        "' is outside any section");
    }
    for (const auto& [key, value] : body) {
      settings.Set(section + "." + key, value.get_value<std::string>());
    }
  }
  return settings;
}

void RunSettings::Set(const std::string& key, const std::string& value) {
  if (KnownSettings().count(key) == 0) {
    throw ConfigError("unknown setting '" + key + "'");
  }
  values_[key] = value;
}

void RunSettings::SetAssignment(const std::string& assignment) {
  const size_t eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("expected section.key=value, got '" + assignment + "'");
  }
  Set(assignment.substr(0, eq), assignment.substr(eq + 1));
}

std::string RunSettings::GetString(const std::string& key,
                                   const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

int RunSettings::GetInt(const std::string& key, int fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : ParseNumber<int>(key, it->second);
}

uint64_t RunSettings::GetU64(const std::string& key, uint64_t fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : ParseNumber<uint64_t>(key, it->second);
}

double RunSettings::GetDouble(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : ParseNumber<double>(key, it->second);
}

bool RunSettings::GetBool(const std::string& key, bool fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const std::string v = Lower(it->second);
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError("setting " + key + ": expected a boolean, got '" +
                    it->second + "'");
}

DatasetOptions DatasetFromSettings(const RunSettings& s, uint64_t seed) {
  DatasetOptions o;
  o.num_scenes = s.GetInt("dataset.num_scenes", 100);
  o.split = s.GetString("dataset.split", "pretrain");
  o.seed = seed;
  o.num_classes = s.GetInt("dataset.classes", 8);
  o.clip_seconds = s.GetDouble("dataset.clip_seconds", 3.0);
  o.source_dir = s.GetString("dataset.source_dir", "");
  if (o.num_scenes < 0) throw ConfigError("dataset.num_scenes must be >= 0");
  if (o.num_classes < 1) throw ConfigError("dataset.classes must be >= 1");
  if (!(o.clip_seconds > 0.0)) throw ConfigError("dataset.clip_seconds must be positive");
  return o;
}

FeatureConfig FeaturesFromSettings(const RunSettings& s) {
  FeatureConfig f;
  f.stft.fft_size = s.GetInt("features.fft_size", f.stft.fft_size);
  f.stft.hop_size = s.GetInt("features.hop_size", f.stft.hop_size);
  f.mel.num_mels = s.GetInt("features.num_mels", f.mel.num_mels);
  f.mel.f_min = s.GetDouble("features.f_min", f.mel.f_min);
  f.mel.f_max = s.GetDouble("features.f_max", f.mel.f_max);
  f.num_frames = s.GetInt("features.num_frames", f.num_frames);
  f.stft.Validate();
  f.mel.Validate(f.sample_rate);
  return f;
}

AugmentationPlan PlanFromSettings(const RunSettings& s) {
  AugmentationPlan p;
  p.channel_swap = s.GetBool("augment.channel_swap", p.channel_swap);
  p.mixup = s.GetBool("augment.mixup", p.mixup);
  p.random_resized_crop = s.GetBool("augment.random_resized_crop", p.random_resized_crop);
  p.channel_drop = s.GetBool("augment.channel_drop", p.channel_drop);
  auto& mp = p.mixup_params;
  mp.alpha_lo = s.GetDouble("augment.mixup_alpha_lo", mp.alpha_lo);
  mp.alpha_hi = s.GetDouble("augment.mixup_alpha_hi", mp.alpha_hi);
  auto& rp = p.rrc_params;
  rp.scale_lo = s.GetDouble("augment.rrc_scale_lo", rp.scale_lo);
  rp.scale_hi = s.GetDouble("augment.rrc_scale_hi", rp.scale_hi);
  rp.aspect_lo = s.GetDouble("augment.rrc_aspect_lo", rp.aspect_lo);
  rp.aspect_hi = s.GetDouble("augment.rrc_aspect_hi", rp.aspect_hi);
  p.channel_drop_params.drop_probability =
      s.GetDouble("augment.drop_probability", p.channel_drop_params.drop_probability);
  if (!(mp.alpha_lo >= 0.0 && mp.alpha_lo <= mp.alpha_hi && mp.alpha_hi < 1.0)) {
    throw ConfigError("Mixup alpha range must satisfy 0 <= lo <= hi < 1");
  }
  if (!(rp.scale_lo > 0.0 && rp.scale_lo <= rp.scale_hi && rp.scale_hi <= 1.0)) {
    throw ConfigError("crop scale range must satisfy 0 < lo <= hi <= 1");
  }
  if (!(rp.aspect_lo > 0.0 && rp.aspect_lo <= rp.aspect_hi)) {
    throw ConfigError("crop aspect range must satisfy 0 < lo <= hi");
  }
  const double drop = p.channel_drop_params.drop_probability;
  if (!(drop >= 0.0 && drop <= 1.0)) {
    throw ConfigError("augment.drop_probability must lie in [0, 1]");
  }
  return p;
}

PretrainConfig PretrainFromSettings(const RunSettings& s, uint64_t seed) {
  PretrainConfig c;
  c.batch_pairs = s.GetInt("pretrain.batch_pairs", c.batch_pairs);
  c.epochs = s.GetInt("pretrain.epochs", c.epochs);
  c.base_lr = s.GetDouble("pretrain.base_lr", c.base_lr);
  c.warmup_epochs = s.GetInt("pretrain.warmup_epochs", c.warmup_epochs);
  c.sgd.momentum = s.GetDouble("pretrain.momentum", c.sgd.momentum);
  c.sgd.weight_decay = s.GetDouble("pretrain.weight_decay", c.sgd.weight_decay);
  c.ntxent.temperature = s.GetDouble("pretrain.temperature", c.ntxent.temperature);
  c.checkpoint_every = s.GetInt("pretrain.checkpoint_every", c.checkpoint_every);
  c.stats_recordings = s.GetInt("pretrain.stats_recordings", c.stats_recordings);
  c.plan = PlanFromSettings(s);
  c.features = FeaturesFromSettings(s);
  c.network.num_classes = s.GetInt("dataset.classes", c.network.num_classes);
  c.network.height = c.features.mel.num_mels;
  c.network.width = c.features.num_frames;
  c.seed = seed;
  c.Validate();
  return c;
}

EvalProtocol EvalFromSettings(const RunSettings& s, EvalMode mode,
                              uint64_t seed) {
  EvalProtocol p;
  p.mode = mode;
  p.pretrained = !s.GetString("eval.checkpoint", "").empty();
  p.num_classes = s.GetInt("eval.num_classes", s.GetInt("dataset.classes", 8));
  p.lr = s.GetDouble("eval.lr", p.lr);
  p.batch_size = s.GetInt("eval.batch_size", p.batch_size);
  p.epochs = s.GetInt("eval.epochs", p.epochs);
  p.warmup_epochs = s.GetInt("eval.warmup_epochs", p.warmup_epochs);
  p.sgd.momentum = s.GetDouble("eval.momentum", p.sgd.momentum);
  p.sgd.weight_decay = s.GetDouble("eval.weight_decay", p.sgd.weight_decay);
  p.encoder_grad_scale = s.GetDouble("eval.encoder_grad_scale", p.encoder_grad_scale);
  p.channel_swap = s.GetBool("eval.channel_swap", p.channel_swap);
  p.select_best = s.GetBool("eval.select_best", p.select_best);
  p.standardize_embeddings =
      s.GetBool("eval.standardize_embeddings", p.standardize_embeddings);
  p.seed = seed;
  if (p.num_classes < 1) throw ConfigError("eval.num_classes must be >= 1");
  if (p.batch_size < 1) throw ConfigError("eval.batch_size must be >= 1");
  if (p.epochs < 1) throw ConfigError("eval.epochs must be >= 1");
  if (p.warmup_epochs < 0) throw ConfigError("eval.warmup_epochs must be >= 0");
  if (!(p.lr >= 0.0)) throw ConfigError("eval.lr must be >= 0");
  return p;
}

namespace {

fs::path RequirePath(const RunSettings& s, const std::string& key,
                     const std::string& flag) {
  const std::string v = s.GetString(key, "");
  if (v.empty()) {
    throw ConfigError("missing " + key + " (set it in the config or pass " + flag + ")");
  }
  return v;
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
}

void MakeDirs(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create " + dir.string());
}

int RunSimulate(const RunSettings& s, uint64_t seed, std::ostream& out) {
  const DatasetOptions opts = DatasetFromSettings(s, seed);
  const fs::path dir = RequirePath(s, "dataset.out_dir", "--out");
  const fs::path manifest = BuildDataset(opts, dir);
  out << "wrote " << opts.num_scenes << " scenes to " << manifest.string() << "\n";
  return 0;
}

int RunPretrain(const RunSettings& s, uint64_t seed, bool resume,
                std::ostream& out) {
  const PretrainConfig cfg = PretrainFromSettings(s, seed);
  const fs::path manifest = RequirePath(s, "pretrain.manifest", "--manifest");
  const fs::path dir = RequirePath(s, "pretrain.out_dir", "--out");
  const int log_every = std::max(1, s.GetInt("pretrain.log_every", 10));
  const size_t cache = static_cast<size_t>(
      std::max(0, s.GetInt("pretrain.cache_mb", 1024))) << 20;
  RecordingPool pool(ReadManifest(manifest), cache);
  char line[160];
  PretrainResult r = Pretrain(cfg, pool, dir, resume, [&](const PretrainStep& st) {
    if (st.step % log_every == 0) {
      std::snprintf(line, sizeof(line), "step %d epoch %d lr %.5f loss %.4f\n",
                    st.step, st.epoch, st.lr, st.loss);
      out << line << std::flush;
    }
  });
  for (size_t e = 0; e < r.epoch_losses.size(); ++e) {
    const int epoch = r.checkpoint.epochs_done - static_cast<int>(r.epoch_losses.size()) +
                      static_cast<int>(e);
    std::snprintf(line, sizeof(line), "epoch %d mean loss %.4f\n", epoch, r.epoch_losses[e]);
    out << line;
  }
  out << "checkpoint " << (dir / "checkpoint.bin").string() << "\n";
  return 0;
}

std::string HistoryCsv(const std::vector<EpochMetrics>& history) {
  std::string text = "epoch,train_loss,val_accuracy,val_error_deg\n";
  char row[128];
  for (const EpochMetrics& m : history) {
    std::snprintf(row, sizeof(row), "%d,%.9g,%.6f,%.6f\n", m.epoch, m.train_loss,
                  m.val_accuracy, m.val_error_deg);
    text += row;
  }
  return text;
}

int RunEval(const RunSettings& s, EvalMode mode, uint64_t seed,
            std::ostream& out) {
  EvalProtocol protocol = EvalFromSettings(s, mode, seed);
  const FeatureConfig features = FeaturesFromSettings(s);
  const fs::path train_path = RequirePath(s, "eval.train_manifest", "--train");
  const fs::path test_path = RequirePath(s, "eval.test_manifest", "--test");
  const fs::path dir = RequirePath(s, "eval.out_dir", "--out");
  const std::string checkpoint = s.GetString("eval.checkpoint", "");
  const double clip_seconds = s.GetDouble("dataset.clip_seconds", 3.0);
  const double val_fraction = s.GetDouble("eval.val_fraction", 0.1);
  const double subset_hours = s.GetDouble("eval.subset_hours", 0.0);
  const double subset_fraction = s.GetDouble("eval.subset_fraction", 1.0);
  if (!(val_fraction > 0.0 && val_fraction < 1.0)) {
    throw ConfigError("eval.val_fraction must lie in (0, 1)");
  }
  if (!(subset_fraction > 0.0 && subset_fraction <= 1.0)) {
    throw ConfigError("eval.subset_fraction must lie in (0, 1]");
  }
  const bool subset = mode == EvalMode::kFineTune &&
                      (subset_hours > 0.0 || subset_fraction < 1.0);

  RngStream rng(MixSeed(seed, kSplitKey));
  auto [train_m, val_m] = SplitValidation(ReadManifest(train_path), val_fraction, rng);
  if (subset) {
    train_m = subset_hours > 0.0
                  ? SubsetSelectHours(train_m, subset_hours, clip_seconds, rng)
                  : SubsetSelectFraction(train_m, subset_fraction, rng);
  }
  const LabeledSet train = LoadLabeledSet(train_m);
  const LabeledSet val = LoadLabeledSet(val_m);
  const LabeledSet test = LoadLabeledSet(ReadManifest(test_path));

  Network<float> encoder;
  FeatureStats stats;
  if (!checkpoint.empty()) {
    Checkpoint ck = LoadCheckpoint(checkpoint);
    encoder = std::move(ck.network);
    stats = std::move(ck.stats);
  } else {
    NetworkConfig nc;
    nc.num_classes = protocol.num_classes;
    nc.height = features.mel.num_mels;
    nc.width = features.num_frames;
    encoder = Network<float>::Initialize(nc, MixSeed(seed, kRandomInitKey));
    stats = ComputeFeatureStats(ExtractLabeledStacks(train, features, FeatureStats{}));
  }
  const TrainedModel model = TrainHeads(protocol, encoder, stats, train, val, features);
  std::vector<ItemPrediction> items;
  EvalReport report = Evaluate(model.network, stats, test, features, &items);
  report.protocol = mode == EvalMode::kLinearProbe ? "linear_probe"
                    : subset                       ? "subset_finetune"
                                                   : "finetune";
  report.encoder_init = protocol.pretrained ? "pretrained" : "random";
  report.name = s.GetString("eval.name", protocol.pretrained ? "Pretrained" : "Random");
  report.labeled_hours = train.size() * clip_seconds / 3600.0;
  report.seed = seed;

  MakeDirs(dir);
  WriteReportJson(report, dir / "report.json");
  WritePredictionsCsv(items, dir / "predictions.csv");
  WriteText(dir / "history.csv", HistoryCsv(model.history));
  Checkpoint saved;
  saved.network = model.network;
  saved.stats = stats;
  saved.epochs_done = protocol.epochs;
  saved.seed = seed;
  SaveCheckpoint(saved, dir / "model.bin");

  char line[200];
  std::snprintf(line, sizeof(line),
                "%s %s (%s): accuracy %.2f%%, azimuth error %.2f deg, %zu train clips\n",
                report.name.c_str(), report.protocol.c_str(), report.encoder_init.c_str(),
                report.accuracy_percent, report.azimuth_error_deg, train.size());
  out << line;
  return 0;
}

int RunReport(const std::vector<std::string>& inputs, const std::string& out_dir,
              std::ostream& out) {
  std::vector<EvalReport> reports;
  for (const std::string& in : inputs) reports.push_back(ReadReportJson(in));
  const std::string md = RenderMarkdownTable(reports);
  if (!out_dir.empty()) {
    MakeDirs(out_dir);
    WriteText(fs::path(out_dir) / "table.md", md);
    WriteText(fs::path(out_dir) / "table.csv", RenderReportCsv(reports));
    WriteText(fs::path(out_dir) / "curve.csv", RenderCurveCsv(reports));
  }
  out << md;
  return 0;
}

std::string SettingsHelp() {
  std::string text = "Config keys ([section] key = value):\n";
  for (const auto& [key, doc] : KnownSettings()) {
    text += "  " + key + std::string(key.size() < 30 ? 30 - key.size() : 1, ' ') + doc + "\n";
  }
  return text;
}

}  // namespace

int CliMain(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Contrastive pre-training and evaluation for spatial audio", "spatialcl"};
  app.require_subcommand(1);
  app.footer(SettingsHelp());

  std::string config_path;
  uint64_t seed = 0;
  int threads = 0;
  bool resume = false;
  std::vector<std::string> assignments;
  std::vector<std::pair<std::string, std::string>> overrides;
  std::vector<std::string> report_inputs;
  std::string report_out;

  auto common = [&](CLI::App* sub, bool stochastic) {
    sub->add_option("--config", config_path, "INI config file");
    sub->add_option("--set", assignments, "override a setting, section.key=value");
    sub->add_option("--threads", threads, "OpenMP threads (0 keeps the default)");
    if (stochastic) sub->add_option("--seed", seed, "master seed")->required();
  };
  auto alias = [&](CLI::App* sub, const std::string& flag, const std::string& key,
                   const std::string& help) {
    sub->add_option_function<std::string>(
        flag, [&overrides, key](const std::string& v) { overrides.emplace_back(key, v); },
        help + " (" + key + ")");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "simulate a labeled scene dataset");
  common(simulate, true);
  alias(simulate, "--out", "dataset.out_dir", "output directory");
  alias(simulate, "--n", "dataset.num_scenes", "number of scenes");
  alias(simulate, "--split", "dataset.split", "split name");
  alias(simulate, "--classes", "dataset.classes", "number of classes");
  alias(simulate, "--clip-seconds", "dataset.clip_seconds", "clip length");
  alias(simulate, "--source-dir", "dataset.source_dir", "per-class WAV folders");

  CLI::App* pretrain = app.add_subcommand("pretrain", "contrastive pre-training");
  common(pretrain, true);
  alias(pretrain, "--manifest", "pretrain.manifest", "pre-training manifest");
  alias(pretrain, "--out", "pretrain.out_dir", "run directory");
  alias(pretrain, "--epochs", "pretrain.epochs", "epochs");
  alias(pretrain, "--batch-pairs", "pretrain.batch_pairs", "pairs per batch");
  alias(pretrain, "--lr", "pretrain.base_lr", "peak learning rate");
  alias(pretrain, "--drop-p", "augment.drop_probability", "ChannelDrop probability");
  pretrain->add_option_function<std::string>(
      "--augment",
      [&overrides](const std::string& list) {
        std::map<std::string, bool> on = {
            {"cs", false}, {"mx", false}, {"rrc", false}, {"cd", false}};
        std::stringstream ss(list);
        std::string item;
        while (std::getline(ss, item, ',')) {
          if (item == "none" || item.empty()) continue;
          if (on.count(item) == 0) {
            throw CLI::ValidationError("--augment", "unknown augmentation '" + item + "'");
          }
          on[item] = true;
        }
        overrides.emplace_back("augment.channel_swap", on["cs"] ? "1" : "0");
        overrides.emplace_back("augment.mixup", on["mx"] ? "1" : "0");
        overrides.emplace_back("augment.random_resized_crop", on["rrc"] ? "1" : "0");
        overrides.emplace_back("augment.channel_drop", on["cd"] ? "1" : "0");
      },
      "comma list of cs, mx, rrc, cd, or none");
  pretrain->add_flag("--resume", resume, "continue from <out>/checkpoint.bin");

  CLI::App* probe = app.add_subcommand("probe", "linear probing on a frozen encoder");
  CLI::App* finetune = app.add_subcommand("finetune", "end-to-end fine-tuning");
  for (CLI::App* sub : {probe, finetune}) {
    common(sub, true);
    alias(sub, "--checkpoint", "eval.checkpoint", "pre-trained checkpoint");
    alias(sub, "--train", "eval.train_manifest", "labeled training manifest");
    alias(sub, "--test", "eval.test_manifest", "test manifest");
    alias(sub, "--out", "eval.out_dir", "output directory");
    alias(sub, "--epochs", "eval.epochs", "epochs");
    alias(sub, "--name", "eval.name", "report row label");
    alias(sub, "--lr", "eval.lr", "learning rate");
  }
  alias(finetune, "--subset-hours", "eval.subset_hours", "labeled hours to use");
  alias(finetune, "--subset-fraction", "eval.subset_fraction", "labeled fraction to use");
  alias(finetune, "--grad-scale", "eval.encoder_grad_scale", "encoder gradient scale");

  CLI::App* report = app.add_subcommand("report", "render reports as tables and curves");
  report->add_option("reports", report_inputs, "report.json files")->required();
  report->add_option("--out", report_out, "directory for table.md, table.csv, curve.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (report->parsed()) return RunReport(report_inputs, report_out, out);

    RunSettings settings =
        config_path.empty() ? RunSettings() : RunSettings::FromFile(config_path);
    for (const auto& [key, value] : overrides) settings.Set(key, value);
    for (const std::string& a : assignments) settings.SetAssignment(a);
    if (threads > 0) omp_set_num_threads(threads);

    if (simulate->parsed()) return RunSimulate(settings, seed, out);
    if (pretrain->parsed()) return RunPretrain(settings, seed, resume, out);
    if (probe->parsed()) return RunEval(settings, EvalMode::kLinearProbe, seed, out);
    if (finetune->parsed()) return RunEval(settings, EvalMode::kFineTune, seed, out);
  } catch (const Error& e) {
    err << "error (" << ErrorKindName(e.kind()) << "): " << e.what() << "\n";
    return ExitCodeFor(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace spatialcl
