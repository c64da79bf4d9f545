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

#include "spatialcl/dataset.h"

#include <algorithm>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <string>

#include "json.hpp"
#include "spatialcl/errors.h"
#include "spatialcl/resample.h"
#include "spatialcl/wav_io.h"

namespace spatialcl {
namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

uint64_t SplitCode(const std::string& split) {
  if (split == "pretrain") return 0;
  if (split == "train") return 1;
  if (split == "val") return 2;
  if (split == "test") return 3;
  // Anything else hashes into the remaining codes.
  uint64_t h = 1469598103934665603ull;
  for (char c : split) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ull;
  return 4 + h % 252;
}

struct SourceLibrary {
  std::vector<std::vector<fs::path>> files_by_class;
};

SourceLibrary ScanSourceDir(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw Error(ErrorKind::kIo, "source directory not found: " + dir.string());
  }
  std::vector<fs::path> class_dirs;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_directory()) class_dirs.push_back(e.path());
  }
  std::sort(class_dirs.begin(), class_dirs.end());
  SourceLibrary lib;
  for (const fs::path& cd : class_dirs) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(cd)) {
      if (e.is_regular_file() && e.path().extension() == ".wav") {
        files.push_back(e.path());
      }
    }
    std::sort(files.begin(), files.end());
    if (!files.empty()) lib.files_by_class.push_back(std::move(files));
  }
  if (lib.files_by_class.empty()) {
    throw Error(ErrorKind::kData,
                "no class subdirectories with WAV files under " + dir.string());
  }
  return lib;
}

std::vector<double> FitToLength(std::vector<double> x, int64_t n) {
  x.resize(n, 0.0);
  return x;
}

std::vector<double> LoadMonoSource(const fs::path& path, int64_t n) {
  const MultiChannelWaveform w = Resample(LoadWav(path), kWorkingSampleRate);
  std::vector<double> mono(w.num_samples(), 0.0);
  for (int c = 0; c < w.num_channels(); ++c) {
    auto ch = w.channel(c);
    for (int64_t i = 0; i < w.num_samples(); ++i) mono[i] += ch[i] / w.num_channels();
  }
  mono = FitToLength(std::move(mono), n);
  double peak = 0.0;
  for (double v : mono) peak = std::max(peak, std::abs(v));
  if (peak > 0.0) {
    for (double& v : mono) v /= peak;
  }
  return mono;
}

}  // namespace

Manifest ReadManifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open manifest " + path.string());
  Manifest m;
  m.directory = path.parent_path();
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      ManifestEntry e;
      e.path = j.at("path").get<std::string>();
      e.class_label = j.at("class").get<int>();
      e.azimuth_deg = j.at("azimuth_deg").get<double>();
      const auto& room = j.at("room");
      e.room = {room.at("w").get<double>(), room.at("l").get<double>(),
                room.at("h").get<double>()};
      e.rt60 = room.at("rt60").get<double>();
      e.seed = j.at("seed").get<uint64_t>();
      m.entries.push_back(std::move(e));
    } catch (const nlohmann::json::exception& ex) {
      throw Error(ErrorKind::kFormat,
                  path.string() + ":" + std::to_string(line_no) + ": " + ex.what());
    }
  }
  return m;
}

void WriteManifest(const Manifest& manifest, const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write manifest " + path.string());
  for (const ManifestEntry& e : manifest.entries) {
    ordered_json j;
    j["path"] = e.path;
    j["class"] = e.class_label;
    j["azimuth_deg"] = e.azimuth_deg;
    j["room"] = {{"w", e.room.width},
                 {"l", e.room.length},
                 {"h", e.room.height},
                 {"rt60", e.rt60}};
    j["seed"] = e.seed;
    out << j.dump() << '\n';
  }
  if (!out) throw Error(ErrorKind::kIo, "write failed for " + path.string());
}

MultiChannelWaveform LoadRecording(const Manifest& manifest,
                                   const ManifestEntry& entry) {
  return Resample(LoadWav(manifest.Resolve(entry)), kWorkingSampleRate);
}

uint64_t SceneSeed(uint64_t master_seed, const std::string& split, int index) {
  return SplitCode(split) << 56 | (master_seed & 0xFFFFFFFFull) << 24 |
         static_cast<uint64_t>(index & 0xFFFFFF);
}

fs::path BuildDataset(const DatasetOptions& options, const fs::path& out_dir) {
  if (options.num_scenes < 0 || options.num_scenes > (1 << 24)) {
    throw Error(ErrorKind::kConfig, "scene count out of range");
  }
  if (options.num_classes < 1) {
    throw Error(ErrorKind::kConfig, "need at least one class");
  }
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    throw Error(ErrorKind::kIo, "cannot create " + out_dir.string() + ": " +
                                    ec.message());
  }
  SourceLibrary library;
  int num_classes = options.num_classes;
  if (!options.source_dir.empty()) {
    library = ScanSourceDir(options.source_dir);
    num_classes = static_cast<int>(library.files_by_class.size());
  } else if (num_classes > kMaxSynthClasses) {
    throw Error(ErrorKind::kConfig, "at most 20 synthetic classes");
  }

  const ArrayGeometry geom = ArrayGeometry::Circular();
  const int64_t clip_len =
      static_cast<int64_t>(std::lround(options.clip_seconds * kWorkingSampleRate));
  Manifest manifest;
  manifest.directory = out_dir;
  manifest.entries.resize(options.num_scenes);
  std::exception_ptr failure;
  std::mutex failure_mu;

#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < options.num_scenes; ++i) {
    try {
      const uint64_t seed = SceneSeed(options.seed, options.split, i);
      RngStream rng(seed);
      RoomScene scene = SampleScene(rng, options.ranges);
      scene.class_label = i % num_classes;
      RngStream source_rng = rng.Split(1);
      std::vector<double> source;
      if (library.files_by_class.empty()) {
        source = SynthSource(scene.class_label, options.clip_seconds, source_rng);
      } else {
        const auto& files = library.files_by_class[scene.class_label];
        source = LoadMonoSource(files[source_rng.UniformInt(files.size())], clip_len);
      }
      const MultiChannelWaveform rec = RenderScene(scene, geom, source);
      char name[64];
      std::snprintf(name, sizeof(name), "%s_%06d.wav", options.split.c_str(), i);
      SaveWav(rec, out_dir / name);
      ManifestEntry& e = manifest.entries[i];
      e.path = name;
      e.class_label = scene.class_label;
      e.azimuth_deg = scene.azimuth_deg;
      e.room = scene.room;
      e.rt60 = scene.rt60;
      e.seed = seed;
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mu);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  const fs::path manifest_path = out_dir / (options.split + ".jsonl");
  WriteManifest(manifest, manifest_path);
  return manifest_path;
}

}  // namespace spatialcl
