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

#include "spatialcl/checkpoint.h"

#include <bit>
#include <fstream>
#include <iterator>
#include <string>

#include "spatialcl/errors.h"

namespace spatialcl {
namespace {

constexpr char kMagic[8] = {'S', 'P', 'C', 'L', 'C', 'K', 'P', 'T'};

class Writer {
 public:
  void U8(uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void U32(uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>(v >> (8 * i)));
  }
  void U64(uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>(v >> (8 * i)));
  }
  void F32(float v) { U32(std::bit_cast<uint32_t>(v)); }
  void Bytes(const char* p, size_t n) { buf_.append(p, n); }
  const std::string& buffer() const { return buf_; }

 private:
  std::string buf_;
};

class Reader {
 public:
  Reader(std::string data, std::string name)
      : data_(std::move(data)), name_(std::move(name)) {}
  const char* Take(size_t n) {
    if (pos_ + n > data_.size()) {
      throw Error(ErrorKind::kFormat, name_ + ": truncated checkpoint");
    }
    const char* p = data_.data() + pos_;
    pos_ += n;
    return p;
  }
  uint8_t U8() { return static_cast<uint8_t>(*Take(1)); }
  uint32_t U32() {
    const auto* p = reinterpret_cast<const unsigned char*>(Take(4));
    return p[0] | p[1] << 8 | p[2] << 16 | static_cast<uint32_t>(p[3]) << 24;
  }
  uint64_t U64() {
    const uint64_t lo = U32();
    return lo | static_cast<uint64_t>(U32()) << 32;
  }
  float F32() { return std::bit_cast<float>(U32()); }
  bool AtEnd() const { return pos_ == data_.size(); }

 private:
  std::string data_;
  std::string name_;
  size_t pos_ = 0;
};

void WriteBlobs(Writer& w, const ParamList<float>& params) {
  for (const Param<float>& p : params) {
    for (float v : p.value) w.F32(v);
  }
}

}  // namespace

void SaveCheckpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  const Network<float>& net = ckpt.network;
  const NetworkConfig& c = net.config;
  Writer w;
  w.Bytes(kMagic, sizeof(kMagic));
  w.U32(kCheckpointVersion);
  for (int v : {c.in_channels, c.height, c.width, c.conv_widths[0],
                c.conv_widths[1], c.conv_widths[2], c.embedding_dim,
                c.projection_dim, c.num_classes}) {
    w.U32(static_cast<uint32_t>(v));
  }
  w.U32(static_cast<uint32_t>(ckpt.epochs_done));
  w.U64(ckpt.seed);
  w.U32(static_cast<uint32_t>(net.params.size()));
  for (const Param<float>& p : net.params) {
    w.U32(static_cast<uint32_t>(p.name.size()));
    w.Bytes(p.name.data(), p.name.size());
    w.U8(static_cast<uint8_t>(p.group));
    w.U8(static_cast<uint8_t>(p.shape.size()));
    for (int d : p.shape) w.U32(static_cast<uint32_t>(d));
  }
  w.U32(static_cast<uint32_t>(ckpt.stats.mean.size()));
  for (float v : ckpt.stats.mean) w.F32(v);
  for (float v : ckpt.stats.stddev) w.F32(v);
  const bool has_velocity = !ckpt.optimizer.velocity.empty();
  w.U8(has_velocity ? 1 : 0);
  WriteBlobs(w, net.params);
  if (has_velocity) WriteBlobs(w, ckpt.optimizer.velocity);

  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::kIo, "cannot write " + tmp.string());
    out.write(w.buffer().data(), static_cast<std::streamsize>(w.buffer().size()));
    if (!out) throw Error(ErrorKind::kIo, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw Error(ErrorKind::kIo,
                "cannot move checkpoint into " + path.string() + ": " + ec.message());
  }
}

Checkpoint LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open checkpoint " + path.string());
  Reader r(std::string(std::istreambuf_iterator<char>(in), {}), path.string());
  if (std::string(r.Take(sizeof(kMagic)), sizeof(kMagic)) !=
      std::string(kMagic, sizeof(kMagic))) {
    throw Error(ErrorKind::kFormat, path.string() + ": not a checkpoint");
  }
  const uint32_t version = r.U32();
  if (version != kCheckpointVersion) {
    throw Error(ErrorKind::kUnsupported,
                path.string() + ": checkpoint version " + std::to_string(version));
  }
  NetworkConfig c;
  c.in_channels = static_cast<int>(r.U32());
  c.height = static_cast<int>(r.U32());
  c.width = static_cast<int>(r.U32());
  for (int& v : c.conv_widths) v = static_cast<int>(r.U32());
  c.embedding_dim = static_cast<int>(r.U32());
  c.projection_dim = static_cast<int>(r.U32());
  c.num_classes = static_cast<int>(r.U32());
  try {
    c.Validate();
  } catch (const Error&) {
    throw Error(ErrorKind::kFormat, path.string() + ": invalid network header");
  }

  Checkpoint ckpt;
  ckpt.epochs_done = static_cast<int>(r.U32());
  ckpt.seed = r.U64();
  // Shapes are fixed by the config; the manifest must agree with them.
  ckpt.network = Network<float>::Initialize(c, 0);
  const uint32_t count = r.U32();
  if (count != ckpt.network.params.size()) {
    throw Error(ErrorKind::kFormat, path.string() + ": parameter count mismatch");
  }
  for (Param<float>& p : ckpt.network.params) {
    const uint32_t len = r.U32();
    const std::string name(r.Take(len), len);
    const auto group = static_cast<ParamGroup>(r.U8());
    std::vector<int> shape(r.U8());
    for (int& d : shape) d = static_cast<int>(r.U32());
    if (name != p.name || group != p.group || shape != p.shape) {
      throw Error(ErrorKind::kFormat,
                  path.string() + ": unexpected parameter " + name);
    }
  }
  const uint32_t channels = r.U32();
  ckpt.stats.mean.resize(channels);
  ckpt.stats.stddev.resize(channels);
  for (float& v : ckpt.stats.mean) v = r.F32();
  for (float& v : ckpt.stats.stddev) v = r.F32();
  const bool has_velocity = r.U8() != 0;
  for (Param<float>& p : ckpt.network.params) {
    for (float& v : p.value) v = r.F32();
  }
  if (has_velocity) {
    ckpt.optimizer.velocity = ZerosLike(ckpt.network.params);
    for (Param<float>& p : ckpt.optimizer.velocity) {
      for (float& v : p.value) v = r.F32();
    }
  }
  if (!r.AtEnd()) {
    throw Error(ErrorKind::kFormat, path.string() + ": trailing bytes");
  }
  return ckpt;
}

}  // namespace spatialcl
