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

#include "spatialcl/wav_io.h"

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "spatialcl/errors.h"

namespace spatialcl {
namespace {

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatFloat = 3;
constexpr uint16_t kFormatExtensible = 0xFFFE;

uint32_t ReadU32(const uint8_t* p) {
  return static_cast<uint32_t>(p[0]) | static_cast<uint32_t>(p[1]) << 8 |
         static_cast<uint32_t>(p[2]) << 16 | static_cast<uint32_t>(p[3]) << 24;
}

uint16_t ReadU16(const uint8_t* p) {
  return static_cast<uint16_t>(p[0] | p[1] << 8);
}

void PutU32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void PutU16(std::vector<uint8_t>& out, uint16_t v) {
  out.push_back(static_cast<uint8_t>(v));
  out.push_back(static_cast<uint8_t>(v >> 8));
}

void PutTag(std::vector<uint8_t>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

double DecodeSample(const uint8_t* p, uint16_t format, int bits) {
  if (format == kFormatFloat) {
    return static_cast<double>(std::bit_cast<float>(ReadU32(p)));
  }
  switch (bits) {
    case 16:
      return static_cast<int16_t>(ReadU16(p)) / 32768.0;
    case 24: {
      int32_t v = p[0] | p[1] << 8 | p[2] << 16;
      if (v & 0x800000) v -= 0x1000000;
      return v / 8388608.0;
    }
    case 32:
      return static_cast<int32_t>(ReadU32(p)) / 2147483648.0;
  }
  return 0.0;
}

}  // namespace

MultiChannelWaveform LoadWav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  const std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  const std::string name = path.string();
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw Error(ErrorKind::kFormat, name + ": not a RIFF/WAVE file");
  }

  bool have_fmt = false;
  uint16_t format = 0;
  int channels = 0;
  int sample_rate = 0;
  int bits = 0;
  const uint8_t* data = nullptr;
  size_t data_size = 0;
  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const uint8_t* chunk = bytes.data() + pos;
    const size_t size = ReadU32(chunk + 4);
    const size_t body = pos + 8;
    if (body + size > bytes.size()) {
      // Truncated data chunks are common in the wild; take what is there.
      if (std::memcmp(chunk, "data", 4) != 0) {
        throw Error(ErrorKind::kFormat, name + ": truncated chunk");
      }
    }
    const size_t avail = std::min(size, bytes.size() - body);
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (avail < 16) throw Error(ErrorKind::kFormat, name + ": short fmt chunk");
      const uint8_t* f = bytes.data() + body;
      format = ReadU16(f);
      channels = ReadU16(f + 2);
      sample_rate = static_cast<int>(ReadU32(f + 4));
      bits = ReadU16(f + 14);
      if (format == kFormatExtensible) {
        if (avail < 26) {
          throw Error(ErrorKind::kFormat, name + ": short extensible fmt chunk");
        }
        format = ReadU16(f + 24);  // first two bytes of the subformat GUID
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = bytes.data() + body;
      data_size = avail;
    }
    pos = body + size + (size & 1);
  }
  if (!have_fmt || data == nullptr) {
    throw Error(ErrorKind::kFormat, name + ": missing fmt or data chunk");
  }
  if (channels < 1 || sample_rate <= 0) {
    throw Error(ErrorKind::kFormat, name + ": invalid channel count or rate");
  }
  const bool supported =
      (format == kFormatPcm && (bits == 16 || bits == 24 || bits == 32)) ||
      (format == kFormatFloat && bits == 32);
  if (!supported) {
    throw Error(ErrorKind::kUnsupported,
                name + ": unsupported encoding (format " +
                    std::to_string(format) + ", " + std::to_string(bits) +
                    " bits)");
  }

  const int bytes_per_sample = bits / 8;
  const size_t frame = static_cast<size_t>(bytes_per_sample) * channels;
  const int64_t frames = static_cast<int64_t>(data_size / frame);
  MultiChannelWaveform w(channels, frames, sample_rate);
  for (int64_t n = 0; n < frames; ++n) {
    const uint8_t* p = data + n * frame;
    for (int c = 0; c < channels; ++c) {
      w.at(c, n) = DecodeSample(p + c * bytes_per_sample, format, bits);
    }
  }
  if (!w.AllFinite()) {
    throw Error(ErrorKind::kData, name + ": non-finite samples");
  }
  return w;
}

void SaveWav(const MultiChannelWaveform& w, const std::filesystem::path& path) {
  const uint32_t channels = static_cast<uint32_t>(w.num_channels());
  const uint64_t data_size = static_cast<uint64_t>(w.num_samples()) * channels * 4;
  if (data_size > 0xFFFFFFFFull - 64) {
    throw Error(ErrorKind::kIo, path.string() + ": too large for RIFF");
  }
  std::vector<uint8_t> out;
  out.reserve(46 + data_size);
  PutTag(out, "RIFF");
  PutU32(out, static_cast<uint32_t>(38 + data_size));
  PutTag(out, "WAVE");
  PutTag(out, "fmt ");
  PutU32(out, 18);
  PutU16(out, kFormatFloat);
  PutU16(out, static_cast<uint16_t>(channels));
  PutU32(out, static_cast<uint32_t>(w.sample_rate()));
  PutU32(out, static_cast<uint32_t>(w.sample_rate()) * channels * 4);
  PutU16(out, static_cast<uint16_t>(channels * 4));
  PutU16(out, 32);
  PutU16(out, 0);
  PutTag(out, "data");
  PutU32(out, static_cast<uint32_t>(data_size));
  for (int64_t n = 0; n < w.num_samples(); ++n) {
    for (uint32_t c = 0; c < channels; ++c) {
      PutU32(out, std::bit_cast<uint32_t>(static_cast<float>(w.at(c, n))));
    }
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  file.write(reinterpret_cast<const char*>(out.data()),
             static_cast<std::streamsize>(out.size()));
  if (!file) throw Error(ErrorKind::kIo, "write failed for " + path.string());
}

}  // namespace spatialcl
