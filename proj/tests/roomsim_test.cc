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


#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "spatialcl/augment.h"
#include "spatialcl/features.h"
#include "spatialcl/roomsim.h"
#include "spatialcl/rng.h"
#include "testing_util.h"

namespace spatialcl {
namespace {

constexpr int kRate = 16000;

RoomScene FixedScene() {
  RoomScene scene;
  scene.room = {6.0, 5.0, 3.0};
  scene.rt60 = 0.5;
  scene.array_center = {2.5, 2.0, 1.4};
  scene.array_yaw_deg = 30.0;
  PlaceSource(scene, 50.0, 2.0, 1.6);
  return scene;
}

TEST(SceneTest, MarginalsAreUniform) {
  RngStream rng(1);
  std::vector<double> w, l, h, t;
  for (int i = 0; i < 10000; ++i) {
    RoomScene s = SampleScene(rng);
    ASSERT_TRUE(SceneIsValid(s));
    ASSERT_GE((s.source_position - s.array_center).Norm(), 0.5);
    ASSERT_GT(s.azimuth_deg, -180.0);
    ASSERT_LE(s.azimuth_deg, 180.0);
    w.push_back(s.room.width);
    l.push_back(s.room.length);
    h.push_back(s.room.height);
    t.push_back(s.rt60);
  }
  EXPECT_GT(testing::KsUniformPValue(w, 3.0, 10.0), 0.01);
  EXPECT_GT(testing::KsUniformPValue(l, 3.0, 10.0), 0.01);
  EXPECT_GT(testing::KsUniformPValue(h, 2.5, 4.0), 0.01);
  EXPECT_GT(testing::KsUniformPValue(t, 0.1, 1.0), 0.01);
}

TEST(SceneTest, Deterministic) {
  RngStream a(2), b(2);
  RoomScene x = SampleScene(a), y = SampleScene(b);
  EXPECT_EQ(x.source_position, y.source_position);
  EXPECT_EQ(x.array_center, y.array_center);
  EXPECT_EQ(x.rt60, y.rt60);
  EXPECT_EQ(x.azimuth_deg, y.azimuth_deg);
}

TEST(SceneTest, FrontOfMicZeroIsZeroDegrees) {
  RoomScene scene = FixedScene();
  PlaceSource(scene, 0.0, 1.5, scene.array_center.z);
  EXPECT_NEAR(ArrayAzimuth(scene.array_center, scene.array_yaw_deg,
                           scene.source_position), 0.0, 1e-9);
  auto mics = MicPositions(scene, ArrayGeometry::Circular());
  const double d0 = (mics[0] - scene.source_position).Norm();
  for (int k = 1; k < 4; ++k) {
    EXPECT_LT(d0, (mics[k] - scene.source_position).Norm());
  }
}

TEST(SceneTest, ArrayGeometry) {
  ArrayGeometry g = ArrayGeometry::Circular();
  for (int k = 0; k < 4; ++k) {
    EXPECT_NEAR(g.mic_offsets[k].Norm(), 0.05, 1e-12);
    EXPECT_EQ(g.mic_offsets[k].z, 0.0);
    const double az = std::atan2(g.mic_offsets[k].y, g.mic_offsets[k].x) * 180 / M_PI;
    EXPECT_LT(std::abs(WrapDegrees(az - 90.0 * k)), 1e-9);
  }
}

TEST(AbsorptionTest, Sabine) {
  RoomDims room{5.0, 5.0, 4.0};
  ASSERT_DOUBLE_EQ(room.Volume(), 100.0);
  ASSERT_DOUBLE_EQ(room.SurfaceArea(), 130.0);
  EXPECT_NEAR(Rt60ToAbsorption(0.5, room), 0.161 * 100 / (0.5 * 130), 1e-12);
  EXPECT_NEAR(Rt60ToAbsorption(0.5, room), 0.2477, 1e-4);
  EXPECT_LT(Rt60ToAbsorption(1e9, room), 1e-9);
  EXPECT_EQ(Rt60ToAbsorption(1e-3, room), 1.0);
}

RirOptions Anechoic() {
  RirOptions o;
  o.max_order = 0;
  o.high_pass_hz = 0.0;
  return o;
}

TEST(RirTest, DirectPathDelayAndAmplitude) {
  RoomScene scene = FixedScene();
  const ArrayGeometry geom = ArrayGeometry::Circular();
  auto mics = MicPositions(scene, geom);
  scene.source_position = mics[0] + Vec3{1.0, 0.0, 0.0};
  Rir rir = SimulateRir(scene, geom, Anechoic());
  const std::vector<double>& taps = rir.taps[0];
  const double sum = std::accumulate(taps.begin(), taps.end(), 0.0);
  double e = 0.0, centroid = 0.0;
  for (size_t n = 0; n < taps.size(); ++n) {
    e += taps[n] * taps[n];
    centroid += n * taps[n] * taps[n];
  }
  centroid /= e;
  // For an ideal band-limited pulse at d, sum_n (n - d) sinc^2(n - d) equals
  // -sin(2 pi d) / (2 pi), so the energy centroid is biased by that amount.
  const double d = 16000.0 / 343.0;
  EXPECT_NEAR(centroid, d - std::sin(2.0 * M_PI * d) / (2.0 * M_PI), 0.05);
  EXPECT_NEAR(sum, 1.0, 0.02);
  const auto peak = std::max_element(taps.begin(), taps.end()) - taps.begin();
  EXPECT_EQ(peak, std::lround(16000.0 / 343.0));
}

TEST(RirTest, EquidistantMicsMatch) {
  RoomScene scene = FixedScene();
  scene.source_position = {scene.array_center.x, scene.array_center.y, 2.3};
  Rir rir = SimulateRir(scene, ArrayGeometry::Circular(), Anechoic());
  for (int k = 1; k < 4; ++k) {
    ASSERT_EQ(rir.taps[k].size(), rir.taps[0].size());
    for (size_t n = 0; n < rir.taps[0].size(); ++n) {
      ASSERT_NEAR(rir.taps[k][n], rir.taps[0][n], 1e-9);
    }
  }
}

// Schroeder backward integral in dB, normalized to 0 at t = 0.
std::vector<double> SchroederDb(const std::vector<double>& h) {
  std::vector<double> edc(h.size());
  double acc = 0.0;
  for (size_t i = h.size(); i-- > 0;) {
    acc += h[i] * h[i];
    edc[i] = acc;
  }
  for (double& v : edc) v = 10.0 * std::log10(std::max(v / acc, 1e-300));
  return edc;
}

// Time to -60 dB from a least-squares line through the -5..-35 dB range.
double Rt60FromEdc(const std::vector<double>& db) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
  for (size_t i = 0; i < db.size(); ++i) {
    if (db[i] > -5.0 || db[i] < -35.0) continue;
    const double t = static_cast<double>(i) / kRate;
    sx += t;
    sy += db[i];
    sxx += t * t;
    sxy += t * db[i];
    n += 1;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return -60.0 / slope;
}

TEST(RirTest, SchroederDecayMatchesRt60) {
  RoomScene scene = FixedScene();
  RirOptions opts;
  opts.length_seconds = 1.0;
  Rir rir = SimulateRir(scene, ArrayGeometry::Circular(), opts);
  for (int k = 0; k < 4; ++k) {
    for (double v : rir.taps[k]) ASSERT_TRUE(std::isfinite(v));
    std::vector<double> db = SchroederDb(rir.taps[k]);
    for (size_t i = 1; i < db.size(); ++i) ASSERT_LE(db[i], db[i - 1] + 1e-12);
    const double rt = Rt60FromEdc(db);
    EXPECT_GT(rt, 0.8 * scene.rt60) << "mic " << k;
    EXPECT_LT(rt, 1.2 * scene.rt60) << "mic " << k;
  }
}

TEST(RirTest, LengthCoversRt60) {
  RoomScene scene = FixedScene();
  Rir rir = SimulateRir(scene, ArrayGeometry::Circular());
  EXPECT_GE(rir.taps[0].size(), static_cast<size_t>(scene.rt60 * kRate));
}

TEST(RenderTest, ImpulseGivesScaledRir) {
  RoomScene scene = FixedScene();
  const ArrayGeometry geom = ArrayGeometry::Circular();
  Rir rir = SimulateRir(scene, geom);
  std::vector<double> impulse(1, 1.0);
  MultiChannelWaveform out = RenderScene(scene, geom, impulse);
  ASSERT_EQ(out.num_channels(), 4);
  ASSERT_EQ(out.num_samples(), static_cast<int64_t>(rir.taps[0].size()));
  double peak = 0.0;
  for (int k = 0; k < 4; ++k) {
    for (double v : rir.taps[k]) peak = std::max(peak, std::abs(v));
  }
  for (int k = 0; k < 4; ++k) {
    for (size_t n = 0; n < rir.taps[k].size(); ++n) {
      ASSERT_NEAR(out.at(k, n), rir.taps[k][n] * kRenderPeak / peak, 1e-12);
    }
  }
  EXPECT_NEAR(out.Peak(), kRenderPeak, 1e-12);
}

TEST(RenderTest, ConvolutionIsLinear) {
  RoomScene scene = FixedScene();
  Rir rir = SimulateRir(scene, ArrayGeometry::Circular());
  RngStream rng(3);
  std::vector<double> s = testing::RandomNormal(3000, rng);
  std::vector<double> scaled = s;
  for (double& v : scaled) v *= 2.5;
  MultiChannelWaveform a = ConvolveRir(rir, s);
  MultiChannelWaveform b = ConvolveRir(rir, scaled);
  ASSERT_EQ(a.num_samples(), 3000 + static_cast<int64_t>(rir.taps[0].size()) - 1);
  double scale = a.Peak();
  for (size_t i = 0; i < a.data().size(); ++i) {
    ASSERT_NEAR(b.data()[i], 2.5 * a.data()[i], 1e-9 * scale);
  }
  // Direct-sum oracle on a prefix.
  for (int n = 0; n < 400; n += 7) {
    double acc = 0.0;
    for (int j = 0; j <= n && j < static_cast<int>(rir.taps[1].size()); ++j) {
      acc += rir.taps[1][j] * s[n - j];
    }
    ASSERT_NEAR(a.at(1, n), acc, 1e-9 * scale);
  }
}

TEST(RenderTest, AnechoicGccMatchesGeometry) {
  RngStream rng(4);
  const ArrayGeometry geom = ArrayGeometry::Circular();
  RirOptions anechoic;
  anechoic.max_order = 0;
  std::vector<double> noise = testing::RandomNormal(kRate, rng);
  int checked = 0;
  for (int trial = 0; trial < 20; ++trial) {
    RoomScene scene = SampleScene(rng);
    MultiChannelWaveform w = RenderScene(scene, geom, noise, anechoic);
    auto mics = MicPositions(scene, geom);
    std::vector<Spectrogram> specs;
    for (int k = 0; k < 4; ++k) specs.push_back(Stft(w.channel(k), StftConfig{}));
    for (int a = 0; a < 4; ++a) {
      for (int b = a + 1; b < 4; ++b) {
        const double ta = (mics[a] - scene.source_position).Norm() / kSpeedOfSound * kRate;
        const double tb = (mics[b] - scene.source_position).Norm() / kSpeedOfSound * kRate;
        const double tdoa = ta - tb;
        EXPECT_LE(std::abs(tdoa), 5.0);
        const double frac = std::abs(tdoa - std::floor(tdoa) - 0.5);
        if (frac < 0.05) continue;  // equidistant from two integer lags
        RealMatrix g = GccPhat(specs[a], specs[b], 64);
        int hits = 0, frames = 0;
        for (int t = 0; t < g.cols; ++t) {
          const int start = t * 160;
          double energy = 0.0;
          for (int i = 0; i < 512; ++i) energy += w.at(a, start + i) * w.at(a, start + i);
          if (10 * std::log10(energy / 512 + 1e-30) < -40.0) continue;
          int best = 0;
          for (int r = 1; r < 64; ++r) {
            if (g.at(r, t) > g.at(best, t)) best = r;
          }
          hits += (best - 32 == std::lround(tdoa));
          ++frames;
        }
        ASSERT_GT(frames, 0);
        EXPECT_GE(hits, 0.95 * frames) << "pair " << a << b << " tdoa " << tdoa;
        ++checked;
      }
    }
    // Mic 2 is diametrically opposite mic 0.
    const double t0 = (mics[0] - scene.source_position).Norm();
    const double t2 = (mics[2] - scene.source_position).Norm();
    const double c = std::cos(scene.azimuth_deg * M_PI / 180.0);
    if (std::abs(c) > 1e-3) {
      EXPECT_EQ(t2 - t0 > 0, c > 0);
    }
  }
  EXPECT_GT(checked, 80);
}

TEST(SynthTest, DeterministicPerSeed) {
  RngStream a(5), b(5), c(6);
  std::vector<double> x = SynthSource(3, 1.0, a);
  EXPECT_EQ(x, SynthSource(3, 1.0, b));
  EXPECT_NE(x, SynthSource(3, 1.0, c));
  EXPECT_EQ(x.size(), static_cast<size_t>(kRate));
  double peak = 0.0;
  for (double v : x) peak = std::max(peak, std::abs(v));
  EXPECT_NEAR(peak, 1.0, 1e-9);
}

double SpectralCentroidHz(const std::vector<double>& x) {
  Spectrogram s = Stft(x, StftConfig{});
  double num = 0.0, den = 0.0;
  for (int t = 0; t < s.num_frames; ++t) {
    for (int k = 0; k < s.num_bins; ++k) {
      const double p = std::norm(s.at(k, t));
      num += p * k * kRate / 512.0;
      den += p;
    }
  }
  return num / den;
}

TEST(SynthTest, CentroidStableAcrossSeeds) {
  RngStream rng(7);
  for (int cls = 0; cls < 8; ++cls) {
    std::vector<double> cents;
    for (int i = 0; i < 10; ++i) {
      RngStream r = rng.Split(cls * 100 + i);
      cents.push_back(SpectralCentroidHz(SynthSource(cls, 1.0, r)));
    }
    const double mean = std::accumulate(cents.begin(), cents.end(), 0.0) / cents.size();
    for (double c : cents) EXPECT_NEAR(c, mean, 0.25 * mean) << "class " << cls;
  }
}

std::vector<double> MeanLogMel(const std::vector<double>& x) {
  RealMatrix lm = LogMel(Stft(x, StftConfig{}), MelConfig{}, 512, kRate);
  std::vector<double> mean(lm.rows, 0.0);
  for (int m = 0; m < lm.rows; ++m) {
    for (int t = 0; t < lm.cols; ++t) mean[m] += lm.at(m, t) / lm.cols;
  }
  return mean;
}

TEST(SynthTest, NearestCentroidSeparatesClasses) {
  constexpr int kClasses = 8;
  constexpr int kClips = 100;
  RngStream rng(8);
  std::vector<std::vector<std::vector<double>>> feats(kClasses);
  for (int cls = 0; cls < kClasses; ++cls) {
    for (int i = 0; i < kClips; ++i) {
      RngStream r = rng.Split(cls * 1000 + i);
      feats[cls].push_back(MeanLogMel(SynthSource(cls, 1.0, r)));
    }
  }
  // Centroids from the first half, accuracy on the second half.
  std::vector<std::vector<double>> centroid(kClasses, std::vector<double>(64, 0.0));
  for (int cls = 0; cls < kClasses; ++cls) {
    for (int i = 0; i < kClips / 2; ++i) {
      for (int m = 0; m < 64; ++m) centroid[cls][m] += feats[cls][i][m] / (kClips / 2);
    }
  }
  int correct = 0, total = 0;
  for (int cls = 0; cls < kClasses; ++cls) {
    for (int i = kClips / 2; i < kClips; ++i) {
      int best = 0;
      double best_d = 1e300;
      for (int k = 0; k < kClasses; ++k) {
        double d = 0.0;
        for (int m = 0; m < 64; ++m) {
          const double diff = feats[cls][i][m] - centroid[k][m];
          d += diff * diff;
        }
        if (d < best_d) {
          best_d = d;
          best = k;
        }
      }
      correct += (best == cls);
      ++total;
    }
  }
  EXPECT_GT(static_cast<double>(correct) / total, 0.9);
}

}  // namespace
}  // namespace spatialcl
