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


// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits nonzero when any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <map>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spatialcl/augment.h"
#include "spatialcl/cli.h"
#include "spatialcl/dataset.h"
#include "spatialcl/eval.h"
#include "spatialcl/features.h"
#include "spatialcl/ntxent.h"
#include "spatialcl/roomsim.h"
#include "testing_util.h"

namespace spatialcl {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

// ---------------------------------------------------------------------------
// Fast criteria.

// Windowed, energy-normalized time-domain cross-correlation of one frame.
int NormalizedXcorrLag(const std::vector<double>& a, const std::vector<double>& b,
                       int start, const std::vector<double>& window, int max_lag) {
  const int n = static_cast<int>(window.size());
  double ea = 0.0, eb = 0.0;
  for (int i = 0; i < n; ++i) {
    ea += std::pow(window[i] * a[start + i], 2);
    eb += std::pow(window[i] * b[start + i], 2);
  }
  const double norm = std::sqrt(ea * eb);
  double best = -2.0;
  int best_lag = 0;
  for (int lag = -max_lag; lag < max_lag; ++lag) {
    double acc = 0.0;
    for (int i = std::max(0, lag); i < std::min(n, n + lag); ++i) {
      acc += window[i] * a[start + i] * window[i - lag] * b[start + i - lag];
    }
    if (acc / norm > best) {
      best = acc / norm;
      best_lag = lag;
    }
  }
  return best_lag;
}

Outcome GccOracle() {
  constexpr int kSignals = 100, kRate = 16000, kLags = 64, kMaxDelay = 20;
  const StftConfig cfg;
  const std::vector<double> window = HannWindow(cfg.fft_size);
  RngStream rng(1001);
  int64_t voiced = 0, gcc_hits = 0, oracle_hits = 0;
  for (int s = 0; s < kSignals; ++s) {
    const int d = static_cast<int>(rng.UniformInt(-kMaxDelay, kMaxDelay));
    std::vector<double> src(kRate + 2 * kMaxDelay);
    for (double& v : src) v = rng.Normal();
    std::vector<double> lagged(kRate), ref(kRate);
    for (int n = 0; n < kRate; ++n) {
      lagged[n] = src[n + kMaxDelay - d];
      ref[n] = src[n + kMaxDelay];
    }
    const RealMatrix g = GccPhat(Stft(lagged, cfg), Stft(ref, cfg), kLags);
    for (int t = 0; t < g.cols; ++t) {
      double energy = 0.0;
      for (int i = 0; i < cfg.fft_size; ++i) energy += ref[t * cfg.hop_size + i] * ref[t * cfg.hop_size + i];
      if (energy < 1e-6 * cfg.fft_size) continue;
      ++voiced;
      int arg = 0;
      for (int r = 1; r < kLags; ++r) {
        if (g.at(r, t) > g.at(arg, t)) arg = r;
      }
      const int lag = arg - kLags / 2;
      gcc_hits += lag == d;
      oracle_hits +=
          lag == NormalizedXcorrLag(lagged, ref, t * cfg.hop_size, window, kLags / 2);
    }
  }
  const double gcc_rate = 100.0 * gcc_hits / voiced;
  const double oracle_rate = 100.0 * oracle_hits / voiced;
  return {gcc_rate >= 99.0 && oracle_rate >= 99.0,
          Format("argmax == d in %.2f%% and == xcorr oracle in %.2f%% of %lld voiced "
                 "frames (need >= 99%%)",
                 gcc_rate, oracle_rate, static_cast<long long>(voiced))};
}

Outcome GradientCheck() {
  constexpr int kProbes = 24;
  const auto checks = testing::RunGradientChecks(2024, kProbes);
  bool pass = !checks.empty();
  double worst = 0.0;
  std::string worst_name;
  int min_probes = 1 << 30;
  for (const auto& c : checks) {
    pass = pass && c.result.max_relative_error < 1e-4 && c.result.num_probes >= 20;
    min_probes = std::min(min_probes, c.result.num_probes);
    if (c.result.max_relative_error >= worst) {
      worst = c.result.max_relative_error;
      worst_name = c.name;
    }
  }
  return {pass, Format("%zu checks, >= %d probes each, worst relative error %.2e (%s), "
                       "need < 1e-4",
                       checks.size(), min_probes, worst, worst_name.c_str())};
}

Outcome NtXentClosedForm() {
  const NtXentConfig cfg;
  const std::vector<double> ortho = {1, 0, 1, 0, 0, 1, 0, 1};
  const double l_ortho = NtXent<double>(4, 2, ortho.data(), cfg, nullptr);
  const double e_ortho = std::abs(l_ortho - std::log1p(2.0 * std::exp(-10.0)));

  RngStream rng(77);
  constexpr int kPairs = 4, kDim = 8;
  std::vector<double> row(kDim);
  for (double& v : row) v = rng.Normal();
  std::vector<double> same;
  for (int r = 0; r < 2 * kPairs; ++r) same.insert(same.end(), row.begin(), row.end());
  const double l_same = NtXent<double>(2 * kPairs, kDim, same.data(), cfg, nullptr);
  const double e_same = std::abs(l_same - std::log(2.0 * kPairs - 1.0));

  double e_scale = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> z(2 * kPairs * kDim);
    for (double& v : z) v = rng.Normal();
    std::vector<double> scaled = z;
    for (int r = 0; r < 2 * kPairs; ++r) {
      const double f = std::exp(rng.Uniform(-3.0, 3.0));
      for (int c = 0; c < kDim; ++c) scaled[r * kDim + c] *= f;
    }
    e_scale = std::max(e_scale, std::abs(NtXent<double>(2 * kPairs, kDim, z.data(), cfg, nullptr) -
                                         NtXent<double>(2 * kPairs, kDim, scaled.data(), cfg, nullptr)));
  }
  return {e_ortho <= 1e-9 && e_same <= 1e-9 && e_scale <= 1e-9,
          Format("orthonormal |diff| %.1e, identical |diff| %.1e, scaling |diff| %.1e "
                 "(need <= 1e-9)",
                 e_ortho, e_same, e_scale)};
}

Outcome ChannelSwapEquivalence() {
  RngStream rng(404);
  RirOptions anechoic;
  anechoic.max_order = 0;
  const ArrayGeometry geom = ArrayGeometry::Circular();
  std::vector<double> source(4000);
  for (double& v : source) v = rng.Normal();
  double worst = 0.0;
  int cases = 0;
  for (int trial = 0; trial < 10; ++trial) {
    RoomScene scene = SampleScene(rng);
    const double theta = rng.Uniform(-180.0, 180.0);
    const double dist = rng.Uniform(1.0, 2.0);
    PlaceSource(scene, theta, dist, scene.array_center.z);
    const MultiChannelWaveform base = ConvolveRir(SimulateRir(scene, geom, anechoic), source);
    for (const ChannelSwapArrangement& a : AllArrangements()) {
      RoomScene moved = scene;
      PlaceSource(moved, TransformAzimuth(a, theta), dist, scene.array_center.z);
      const MultiChannelWaveform fresh =
          ConvolveRir(SimulateRir(moved, geom, anechoic), source);
      const MultiChannelWaveform swapped = ChannelSwap(base, a);
      if (fresh.num_samples() != swapped.num_samples()) return {false, "length mismatch"};
      for (size_t i = 0; i < fresh.data().size(); ++i) {
        worst = std::max(worst, std::abs(fresh.data()[i] - swapped.data()[i]));
      }
      ++cases;
    }
  }
  return {worst < 1e-6, Format("%d cases, max abs sample diff %.2e (need < 1e-6)", cases, worst)};
}

double T30Rt60(const std::vector<double>& h, int rate) {
  std::vector<double> edc(h.size());
  double acc = 0.0;
  for (size_t i = h.size(); i-- > 0;) {
    acc += h[i] * h[i];
    edc[i] = acc;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
  for (size_t i = 0; i < edc.size(); ++i) {
    const double db = 10.0 * std::log10(std::max(edc[i] / acc, 1e-300));
    if (db > -5.0 || db < -35.0) continue;
    const double t = static_cast<double>(i) / rate;
    sx += t;
    sy += db;
    sxx += t * t;
    sxy += t * db;
    n += 1;
  }
  return -60.0 * (n * sxx - sx * sx) / (n * sxy - sx * sy);
}

// Direct-path arrival: the first tap reaching half the global peak, moved to
// the local maximum right after it. Coincident early reflections can sum to
// more than the direct path, so the global maximum alone is not enough.
size_t OnsetPeak(const std::vector<double>& h) {
  double peak = 0.0;
  for (double v : h) peak = std::max(peak, std::abs(v));
  size_t onset = 0;
  while (std::abs(h[onset]) < 0.5 * peak) ++onset;
  size_t best = onset;
  for (size_t i = onset; i < std::min(h.size(), onset + 3); ++i) {
    if (std::abs(h[i]) > std::abs(h[best])) best = i;
  }
  return best;
}

Outcome RirPhysics() {
  SceneRanges ranges;
  ranges.rt60_lo = 0.3;
  ranges.rt60_hi = 0.8;
  RngStream rng(505);
  const ArrayGeometry geom = ArrayGeometry::Circular();
  RirOptions opts;
  opts.length_seconds = 1.2;
  double worst_ratio = 1.0, worst_offset = 0.0;
  bool pass = true;
  for (int s = 0; s < 20; ++s) {
    const RoomScene scene = SampleScene(rng, ranges);
    const Rir rir = SimulateRir(scene, geom, opts);
    const auto mics = MicPositions(scene, geom);
    for (int k = 0; k < 4; ++k) {
      const std::vector<double>& h = rir.taps[k];
      const double ratio = T30Rt60(h, rir.sample_rate) / scene.rt60;
      if (std::abs(ratio - 1.0) > std::abs(worst_ratio - 1.0)) worst_ratio = ratio;
      pass = pass && ratio >= 0.8 && ratio <= 1.2;
      const double expected =
          (mics[k] - scene.source_position).Norm() / opts.speed_of_sound * rir.sample_rate;
      const double offset = static_cast<double>(OnsetPeak(h)) - expected;
      if (std::abs(offset) > std::abs(worst_offset)) worst_offset = offset;
      pass = pass && std::abs(offset) <= 1.0;
    }
  }
  return {pass, Format("20 scenes x 4 mics: worst decay ratio %.3f (need 0.8..1.2), worst "
                       "direct-path offset %.2f samples (need <= 1)",
                       worst_ratio, worst_offset)};
}

// ---------------------------------------------------------------------------
// Criteria that drive the command-line tool.

class Runner {
 public:
  explicit Runner(fs::path workdir) : workdir_(std::move(workdir)), log_(workdir_ / "cli.log") {}

  const fs::path& workdir() const { return workdir_; }

  void Cli(std::vector<std::string> args) {
    args.insert(args.begin(), "spatialcl");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const auto t0 = std::chrono::steady_clock::now();
    const int code = CliMain(static_cast<int>(argv.size()), argv.data(), out, err);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string line;
    for (const auto& a : args) line += a + " ";
    log_ << "$ " << line << "\n" << out.str() << err.str() << Format("[%.0fs, exit %d]\n", secs, code);
    log_.flush();
    if (code != 0) throw std::runtime_error("command failed (" + err.str() + "): " + line);
  }

 private:
  fs::path workdir_;
  std::ofstream log_;
};

std::string Slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome Determinism(Runner& run) {
  const fs::path root = run.workdir() / "determinism";
  fs::remove_all(root);
  for (const char* tag : {"a", "b"}) {
    const fs::path dir = root / tag;
    const std::string cfg = (root / "run.ini").string();
    fs::create_directories(root);
    std::ofstream(cfg) << "[dataset]\nclasses = 4\nclip_seconds = 1.5\n"
                          "[pretrain]\nbatch_pairs = 8\nwarmup_epochs = 1\n"
                          "stats_recordings = 16\ncheckpoint_every = 1\n"
                          "[eval]\nepochs = 3\nwarmup_epochs = 1\nbatch_size = 16\n";
    for (auto [split, n] : {std::pair{"pretrain", "24"}, {"train", "20"}, {"test", "12"}}) {
      run.Cli({"simulate", "--config", cfg, "--seed", "13", "--n", n, "--split", split,
               "--out", (dir / "data").string()});
    }
    run.Cli({"pretrain", "--config", cfg, "--seed", "13", "--threads", "1", "--epochs", "2",
             "--manifest", (dir / "data" / "pretrain.jsonl").string(), "--out",
             (dir / "run").string()});
    run.Cli({"probe", "--config", cfg, "--seed", "13", "--checkpoint",
             (dir / "run" / "checkpoint.bin").string(), "--train",
             (dir / "data" / "train.jsonl").string(), "--test",
             (dir / "data" / "test.jsonl").string(), "--out", (dir / "probe").string()});
  }
  std::vector<std::string> files = {"data/pretrain.jsonl", "data/train.jsonl",
                                    "data/test.jsonl",     "run/checkpoint.bin",
                                    "run/loss.csv",        "probe/report.json",
                                    "probe/predictions.csv"};
  for (const char* split : {"pretrain", "train", "test"}) {
    const Manifest m = ReadManifest(root / "a" / "data" / (std::string(split) + ".jsonl"));
    for (const auto& e : m.entries) files.push_back("data/" + e.path);
  }
  std::vector<std::string> differing;
  for (const auto& f : files) {
    const std::string a = Slurp(root / "a" / f);
    if (a.empty() || a != Slurp(root / "b" / f)) differing.push_back(f);
  }
  return {differing.empty(),
          differing.empty()
              ? Format("%zu files byte-identical across reruns (manifests, WAVs, "
                       "checkpoint, loss log, report)",
                       files.size())
              : "differs: " + differing.front() +
                    Format(" and %zu more", differing.size() - 1)};
}

struct Scale {
  int pretrain_scenes = 2000;
  int train_scenes = 400;
  int test_scenes = 200;
  int classes = 8;
  int epochs = 15;
  int warmup = 3;
  int batch_pairs = 64;
  int ablation_scenes = 2000;
};

class Experiments {
 public:
  Experiments(Runner& run, Scale scale) : run_(run), scale_(scale) {}

  fs::path Data() {
    const fs::path dir = run_.workdir() / "data";
    if (!data_ready_) {
      fs::remove_all(dir);
      const std::map<std::string, int> splits = {{"pretrain", scale_.pretrain_scenes},
                                                 {"train", scale_.train_scenes},
                                                 {"test", scale_.test_scenes}};
      for (const auto& [split, n] : splits) {
        run_.Cli({"simulate", "--seed", "1", "--n", std::to_string(n), "--split", split,
                  "--classes", std::to_string(scale_.classes), "--out", dir.string()});
      }
      Manifest small = ReadManifest(dir / "pretrain.jsonl");
      small.entries.resize(std::min<size_t>(small.size(), scale_.ablation_scenes));
      WriteManifest(small, dir / "pretrain_small.jsonl");
      data_ready_ = true;
    }
    return dir;
  }

  fs::path Pretrain(const std::string& name, const std::string& manifest,
                    const std::string& augment, const std::string& seed,
                    const std::string& drop_p = "0.1") {
    const fs::path out = run_.workdir() / ("pre_" + name);
    if (done_.insert(name).second) {
      fs::remove_all(out);
      run_.Cli({"pretrain", "--seed", seed, "--manifest", (Data() / manifest).string(),
                "--out", out.string(), "--augment", augment, "--drop-p", drop_p,
                "--epochs", std::to_string(scale_.epochs), "--batch-pairs",
                std::to_string(scale_.batch_pairs), "--set",
                "pretrain.warmup_epochs=" + std::to_string(scale_.warmup), "--set",
                "dataset.classes=" + std::to_string(scale_.classes)});
    }
    return out / "checkpoint.bin";
  }

  EvalReport Eval(const std::string& command, const std::string& name,
                  const std::string& checkpoint, const std::string& seed,
                  std::vector<std::string> extra = {}) {
    const fs::path out = run_.workdir() / ("eval_" + name);
    fs::remove_all(out);
    std::vector<std::string> args = {
        command, "--seed", seed, "--train", (Data() / "train.jsonl").string(),
        "--test", (Data() / "test.jsonl").string(), "--out", out.string(), "--name", name,
        "--set", "dataset.classes=" + std::to_string(scale_.classes)};
    if (!checkpoint.empty()) {
      args.push_back("--checkpoint");
      args.push_back(checkpoint);
    }
    args.insert(args.end(), extra.begin(), extra.end());
    run_.Cli(args);
    const EvalReport r = ReadReportJson(out / "report.json");
    std::printf("  %-28s acc %6.2f%%  err %6.2f deg\n", name.c_str(), r.accuracy_percent,
                r.azimuth_error_deg);
    std::fflush(stdout);
    return r;
  }

 private:
  Runner& run_;
  Scale scale_;
  bool data_ready_ = false;
  std::set<std::string> done_;
};

Outcome EndToEnd(Experiments& ex) {
  const fs::path ck = ex.Pretrain("full", "pretrain.jsonl", "cs,mx,rrc,cd", "5");
  const EvalReport pre = ex.Eval("probe", "probe_pretrained", ck.string(), "9");
  const EvalReport rnd = ex.Eval("probe", "probe_random", "", "9");
  const double gain = pre.accuracy_percent - rnd.accuracy_percent;
  const bool pass = gain >= 10.0 && pre.azimuth_error_deg <= 45.0 && rnd.azimuth_error_deg >= 70.0;
  return {pass, Format("pretrained %.1f%% / %.1f deg vs random %.1f%% / %.1f deg: accuracy "
                       "gain %+.1f (need >= 10), pretrained error %s 45, random error %s 70",
                       pre.accuracy_percent, pre.azimuth_error_deg, rnd.accuracy_percent,
                       rnd.azimuth_error_deg, gain,
                       pre.azimuth_error_deg <= 45.0 ? "<=" : ">",
                       rnd.azimuth_error_deg >= 70.0 ? ">=" : "<")};
}

Outcome Ablation(Experiments& ex) {
  double acc_cs = 0, acc_cd = 0, err_cs = 0, err_cd = 0;
  for (const char* seed : {"1", "2", "3"}) {
    const std::string s = seed;
    const fs::path cs = ex.Pretrain("cs_" + s, "pretrain_small.jsonl", "cs", s);
    const fs::path cd = ex.Pretrain("cs_cd_" + s, "pretrain_small.jsonl", "cs,cd", s, "0.1");
    const EvalReport a = ex.Eval("probe", "probe_cs_" + s, cs.string(), s);
    const EvalReport b = ex.Eval("probe", "probe_cs_cd_" + s, cd.string(), s);
    acc_cs += a.accuracy_percent / 3;
    err_cs += a.azimuth_error_deg / 3;
    acc_cd += b.accuracy_percent / 3;
    err_cd += b.azimuth_error_deg / 3;
  }
  const double gain = acc_cd - acc_cs;
  return {gain >= 2.0 && err_cd < err_cs,
          Format("3-seed mean: CS %.2f%% / %.2f deg, CS+CD(p=0.1) %.2f%% / %.2f deg; "
                 "accuracy gain %+.2f (need >= 2), error %s",
                 acc_cs, err_cs, acc_cd, err_cd, gain,
                 err_cd < err_cs ? "lower with p=0.1" : "not lower with p=0.1")};
}

Outcome DataEfficiency(Experiments& ex) {
  const fs::path ck = ex.Pretrain("full", "pretrain.jsonl", "cs,mx,rrc,cd", "5");
  double acc_pre = 0, acc_rnd = 0, err_pre = 0, err_rnd = 0;
  for (const char* seed : {"1", "2", "3"}) {
    const std::string s = seed;
    const std::vector<std::string> subset = {"--subset-fraction", "0.25"};
    const EvalReport p = ex.Eval("finetune", "ft25_pretrained_" + s, ck.string(), s, subset);
    const EvalReport r = ex.Eval("finetune", "ft25_random_" + s, "", s, subset);
    acc_pre += p.accuracy_percent / 3;
    err_pre += p.azimuth_error_deg / 3;
    acc_rnd += r.accuracy_percent / 3;
    err_rnd += r.azimuth_error_deg / 3;
  }
  return {acc_pre > acc_rnd && err_pre < err_rnd,
          Format("0.25x labels, 3-seed mean: pretrained %.2f%% / %.2f deg vs random "
                 "%.2f%% / %.2f deg",
                 acc_pre, err_pre, acc_rnd, err_rnd)};
}

}  // namespace
}  // namespace spatialcl

int main(int argc, char** argv) {
  using namespace spatialcl;
  CLI::App app{"spatialcl acceptance suite"};
  std::vector<int> criteria = {1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::string workdir = "acceptance_work";
  Scale scale;
  app.add_option("--criteria", criteria, "criteria to run")->delimiter(',');
  app.add_option("--workdir", workdir, "scratch directory");
  app.add_option("--epochs", scale.epochs, "pre-training epochs for criteria 6-8");
  app.add_option("--pretrain-scenes", scale.pretrain_scenes, "pre-training scenes");
  app.add_option("--ablation-scenes", scale.ablation_scenes,
                 "pre-training scenes for the ablation runs");
  CLI11_PARSE(app, argc, argv);

  std::filesystem::create_directories(workdir);
  Runner runner(workdir);
  Experiments experiments(runner, scale);
  const std::map<int, std::function<Outcome()>> table = {
      {1, GccOracle},
      {2, GradientCheck},
      {3, NtXentClosedForm},
      {4, ChannelSwapEquivalence},
      {5, RirPhysics},
      {6, [&] { return EndToEnd(experiments); }},
      {7, [&] { return Ablation(experiments); }},
      {8, [&] { return DataEfficiency(experiments); }},
      {9, [&] { return Determinism(runner); }},
  };
  int failures = 0;
  for (int c : criteria) {
    auto it = table.find(c);
    if (it == table.end()) {
      std::fprintf(stderr, "unknown criterion %d\n", c);
      return 2;
    }
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = it->second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %d %s: %s [%.0fs]\n", c, o.pass ? "PASS" : "FAIL",
                o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
