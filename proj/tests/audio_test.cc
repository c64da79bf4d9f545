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


#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "spatialcl/errors.h"
#include "spatialcl/resample.h"
#include "spatialcl/rng.h"
#include "spatialcl/wav_io.h"
#include "spatialcl/waveform.h"
#include "testing_util.h"

namespace spatialcl {
namespace {

void PutU16(std::string& s, uint16_t v) {
  s.push_back(static_cast<char>(v & 0xFF));
  s.push_back(static_cast<char>(v >> 8));
}

void PutU32(std::string& s, uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>(v >> (8 * i)));
}

// Minimal RIFF writer independent of the library.
std::string RiffBytes(uint16_t format, uint16_t channels, uint32_t rate,
                      uint16_t bits, const std::string& payload) {
  std::string s = "RIFF";
  PutU32(s, static_cast<uint32_t>(36 + payload.size()));
  s += "WAVEfmt ";
  PutU32(s, 16);
  PutU16(s, format);
  PutU16(s, channels);
  PutU32(s, rate);
  PutU32(s, rate * channels * bits / 8);
  PutU16(s, static_cast<uint16_t>(channels * bits / 8));
  PutU16(s, bits);
  s += "data";
  PutU32(s, static_cast<uint32_t>(payload.size()));
  s += payload;
  return s;
}

std::filesystem::path WriteBytes(const std::filesystem::path& dir,
                                 const std::string& name,
                                 const std::string& bytes) {
  auto path = dir / name;
  std::ofstream(path, std::ios::binary) << bytes;
  return path;
}

class WavIoTest : public ::testing::Test {
 protected:
  void SetUp() override { dir_ = testing::MakeTempDir("wav_io"); }
  void TearDown() override { std::filesystem::remove_all(dir_); }
  std::filesystem::path dir_;
};

TEST_F(WavIoTest, ZeroPcm16LoadsAsZero) {
  auto path = WriteBytes(dir_, "z.wav", RiffBytes(1, 1, 16000, 16,
                                                   std::string(200, '\0')));
  MultiChannelWaveform w = LoadWav(path);
  EXPECT_EQ(w.num_channels(), 1);
  EXPECT_EQ(w.num_samples(), 100);
  EXPECT_EQ(w.sample_rate(), 16000);
  for (double v : w.data()) EXPECT_EQ(v, 0.0);
}

TEST_F(WavIoTest, Pcm16FullScale) {
  std::string payload;
  PutU16(payload, 32767);
  PutU16(payload, static_cast<uint16_t>(-32768));
  auto path = WriteBytes(dir_, "p.wav", RiffBytes(1, 1, 8000, 16, payload));
  MultiChannelWaveform w = LoadWav(path);
  EXPECT_DOUBLE_EQ(w.at(0, 0), 32767.0 / 32768.0);
  EXPECT_DOUBLE_EQ(w.at(0, 1), -1.0);
}

TEST_F(WavIoTest, Pcm24And32Interleaved) {
  std::string p24;
  // Channel 0: 0x400000 (0.5); channel 1: -0x200000 (-0.25).
  for (int32_t v : {0x400000, -0x200000}) {
    for (int i = 0; i < 3; ++i) p24.push_back(static_cast<char>(v >> (8 * i)));
  }
  MultiChannelWaveform w24 =
      LoadWav(WriteBytes(dir_, "a.wav", RiffBytes(1, 2, 16000, 24, p24)));
  ASSERT_EQ(w24.num_channels(), 2);
  EXPECT_DOUBLE_EQ(w24.at(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(w24.at(1, 0), -0.25);

  std::string p32;
  PutU32(p32, 0x20000000u);
  MultiChannelWaveform w32 =
      LoadWav(WriteBytes(dir_, "b.wav", RiffBytes(1, 1, 16000, 32, p32)));
  EXPECT_DOUBLE_EQ(w32.at(0, 0), 0.25);
}

TEST_F(WavIoTest, MalformedAndUnsupported) {
  auto garbage = WriteBytes(dir_, "g.wav", "not a wav file at all....");
  try {
    LoadWav(garbage);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kFormat);
  }
  auto pcm8 = WriteBytes(dir_, "u.wav", RiffBytes(1, 1, 16000, 8, "abcd"));
  try {
    LoadWav(pcm8);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kUnsupported);
  }
  try {
    LoadWav(dir_ / "missing.wav");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kIo);
  }
}

TEST_F(WavIoTest, ZeroWaveformSavesZeroFloats) {
  MultiChannelWaveform w(2, 50, 16000);
  auto path = dir_ / "zero.wav";
  SaveWav(w, path);
  std::ifstream in(path, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  size_t pos = bytes.find("data");
  ASSERT_NE(pos, std::string::npos);
  uint32_t size;
  std::memcpy(&size, bytes.data() + pos + 4, 4);
  EXPECT_EQ(size, 2u * 50u * 4u);
  for (size_t i = pos + 8; i < pos + 8 + size; ++i) EXPECT_EQ(bytes[i], 0);
}

TEST_F(WavIoTest, FloatRoundTripIsExact) {
  RngStream rng(5);
  MultiChannelWaveform w(4, 777, 22050);
  for (double& v : w.data()) v = static_cast<float>(rng.Uniform(-1, 1));
  SaveWav(w, dir_ / "rt.wav");
  MultiChannelWaveform back = LoadWav(dir_ / "rt.wav");
  EXPECT_EQ(back.num_channels(), 4);
  EXPECT_EQ(back.num_samples(), 777);
  EXPECT_EQ(back.sample_rate(), 22050);
  EXPECT_EQ(back, w);
}

TEST_F(WavIoTest, DoubleRoundTripWithinFloatPrecision) {
  RngStream rng(6);
  MultiChannelWaveform w(3, 500, 16000);
  for (double& v : w.data()) v = rng.Uniform(-1, 1);
  SaveWav(w, dir_ / "d.wav");
  MultiChannelWaveform back = LoadWav(dir_ / "d.wav");
  double worst = 0.0;
  for (size_t i = 0; i < w.data().size(); ++i) {
    worst = std::max(worst, std::abs(w.data()[i] - back.data()[i]));
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(PeakNormalizeTest, DoublesHalfPeak) {
  MultiChannelWaveform w({{0.5, -0.25}, {0.1, 0.0}}, 16000);
  MultiChannelWaveform out = PeakNormalize(w, 1.0);
  for (size_t i = 0; i < w.data().size(); ++i) {
    EXPECT_DOUBLE_EQ(out.data()[i], 2.0 * w.data()[i]);
  }
}

TEST(PeakNormalizeTest, ZeroPassesThrough) {
  MultiChannelWaveform w(2, 10, 16000);
  EXPECT_EQ(PeakNormalize(w, 0.9), w);
}

TEST(PeakNormalizeTest, RandomPropertiesHold) {
  RngStream rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    MultiChannelWaveform w(4, 300, 16000);
    for (double& v : w.data()) v = rng.Normal() * rng.Uniform(0.01, 3.0);
    const double target = rng.Uniform(0.1, 2.0);
    MultiChannelWaveform once = PeakNormalize(w, target);
    EXPECT_NEAR(once.Peak(), target, 1e-9);
    MultiChannelWaveform twice = PeakNormalize(once, target);
    for (size_t i = 0; i < once.data().size(); ++i) {
      EXPECT_NEAR(twice.data()[i], once.data()[i], 1e-12);
    }
    for (int64_t n = 0; n < w.num_samples(); n += 17) {
      if (w.at(1, n) == 0.0) continue;
      EXPECT_NEAR(once.at(0, n) / once.at(1, n), w.at(0, n) / w.at(1, n),
                  1e-9 * std::abs(w.at(0, n) / w.at(1, n)) + 1e-12);
    }
  }
}

MultiChannelWaveform Ramp(int channels, int64_t n) {
  MultiChannelWaveform w(channels, n, 16000);
  for (int c = 0; c < channels; ++c) {
    for (int64_t i = 0; i < n; ++i) w.at(c, i) = 1.0 + c * 1e5 + i;
  }
  return w;
}

TEST(CropPairTest, OneSecondInputIsReturned) {
  MultiChannelWaveform w = Ramp(4, 16000);
  RngStream rng(1);
  auto [a, b] = CropPair(w, 42, rng);
  EXPECT_EQ(a.waveform, w);
  EXPECT_EQ(b.waveform, w);
  EXPECT_EQ(a.source_id, 42u);
  EXPECT_EQ(b.source_id, 42u);
}

TEST(CropPairTest, ShortInputIsZeroPaddedAtEnd) {
  MultiChannelWaveform w = Ramp(2, 8000);
  RngStream rng(2);
  auto [a, b] = CropPair(w, 0, rng);
  for (const Patch* p : {&a, &b}) {
    ASSERT_EQ(p->waveform.num_samples(), 16000);
    for (int c = 0; c < 2; ++c) {
      for (int64_t i = 0; i < 16000; ++i) {
        EXPECT_EQ(p->waveform.at(c, i), i < 8000 ? w.at(c, i) : 0.0);
      }
    }
  }
}

TEST(CropPairTest, OffsetsAreUniform) {
  MultiChannelWaveform w = Ramp(1, 10 * 16000);
  const int64_t offsets = NumCropOffsets(w);
  ASSERT_EQ(offsets, 9 * 16000 + 1);
  constexpr int kBins = 20;
  std::vector<int64_t> counts(kBins, 0);
  RngStream rng(3);
  for (int draw = 0; draw < 5000; ++draw) {
    auto [a, b] = CropPair(w, 0, rng);
    for (const Patch* p : {&a, &b}) {
      const auto offset = static_cast<int64_t>(p->waveform.at(0, 0) - 1.0);
      ASSERT_GE(offset, 0);
      ASSERT_LT(offset, offsets);
      ++counts[offset * kBins / offsets];
    }
  }
  EXPECT_GT(testing::ChiSquareUniformPValue(counts), 0.01);
}

TEST(CropPairTest, DeterministicForSeed) {
  RngStream noise(9);
  MultiChannelWaveform w(4, 40000, 16000);
  for (double& v : w.data()) v = noise.Normal();
  RngStream r1(11), r2(11);
  auto p1 = CropPair(w, 1, r1);
  auto p2 = CropPair(w, 1, r2);
  EXPECT_EQ(p1.first.waveform, p2.first.waveform);
  EXPECT_EQ(p1.second.waveform, p2.second.waveform);
}

TEST(ResampleTest, SameRateIsIdentity) {
  MultiChannelWaveform w = Ramp(2, 100);
  EXPECT_EQ(Resample(w, 16000), w);
}

TEST(ResampleTest, PreservesLowFrequencySine) {
  constexpr int kIn = 44100;
  constexpr double kFreq = 440.0;
  MultiChannelWaveform w(1, kIn, kIn);
  for (int64_t n = 0; n < kIn; ++n) {
    w.at(0, n) = std::sin(2 * M_PI * kFreq * n / kIn);
  }
  MultiChannelWaveform out = Resample(w, 16000);
  EXPECT_EQ(out.sample_rate(), 16000);
  EXPECT_NEAR(static_cast<double>(out.num_samples()), 16000.0, 1.0);
  double worst = 0.0;
  for (int64_t n = 200; n < out.num_samples() - 200; ++n) {
    worst = std::max(worst,
                     std::abs(out.at(0, n) - std::sin(2 * M_PI * kFreq * n / 16000.0)));
  }
  EXPECT_LT(worst, 1e-2);
}

TEST(WaveformTest, RejectsRaggedChannels) {
  try {
    MultiChannelWaveform w({{1.0, 2.0}, {1.0}}, 16000);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kSize);
  }
}

TEST(ErrorsTest, ExitCodes) {
  EXPECT_EQ(ExitCodeFor(ErrorKind::kConfig), 1);
  EXPECT_EQ(ExitCodeFor(ErrorKind::kNumeric), 3);
  EXPECT_EQ(ExitCodeFor(ErrorKind::kIo), 2);
  EXPECT_EQ(ExitCodeFor(ErrorKind::kFormat), 2);
}

}  // namespace
}  // namespace spatialcl
