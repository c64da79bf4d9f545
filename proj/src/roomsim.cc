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

#include "spatialcl/roomsim.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "spatialcl/augment.h"
#include "spatialcl/errors.h"
#include "spatialcl/fft.h"

namespace spatialcl {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

// Fractional-delay filters tabulated at kPhases + 1 offsets in [0, 1];
// offsets in between interpolate linearly between neighbouring rows.
constexpr int kPhases = 64;
constexpr int kHalfTaps = kSincTaps / 2;

const std::vector<double>& SincTable() {
  static const std::vector<double> table = [] {
    std::vector<double> t((kPhases + 1) * kSincTaps);
    for (int q = 0; q <= kPhases; ++q) {
      const double frac = static_cast<double>(q) / kPhases;
      for (int i = 0; i < kSincTaps; ++i) {
        const double x = i - kHalfTaps - frac;
        const double sinc =
            std::abs(x) < 1e-12
                ? 1.0
                : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
        const double window =
            std::abs(x) <= kSincTaps / 2.0
                ? 0.5 * (1.0 + std::cos(2.0 * std::numbers::pi * x / kSincTaps))
                : 0.0;
        t[q * kSincTaps + i] = sinc * window;
      }
    }
    return t;
  }();
  return table;
}

// Image index range along one axis such that the image coordinate stays
// within `reach` of the receiver.
std::pair<int, int> ImageRange(double receiver, double source, double extent,
                               int parity, double reach) {
  const double base = (1 - 2 * parity) * source;
  const int lo = static_cast<int>(std::ceil((receiver - reach - base) / (2.0 * extent)));
  const int hi = static_cast<int>(std::floor((receiver + reach - base) / (2.0 * extent)));
  return {lo, hi};
}

struct AxisImage {
  double offset;  // image coordinate minus receiver coordinate
  int reflections;
};

std::vector<AxisImage> AxisImages(double receiver, double source, double extent,
                                  double reach, int order_cap) {
  std::vector<AxisImage> images;
  for (int parity = 0; parity <= 1; ++parity) {
    auto [lo, hi] = ImageRange(receiver, source, extent, parity, reach);
    if (order_cap >= 0) {
      lo = std::max(lo, -order_cap - 1);
      hi = std::min(hi, order_cap + 1);
    }
    for (int n = lo; n <= hi; ++n) {
      const int refl = std::abs(n - parity) + std::abs(n);
      if (order_cap >= 0 && refl > order_cap) continue;
      images.push_back(
          {(1 - 2 * parity) * source + 2.0 * n * extent - receiver, refl});
    }
  }
  return images;
}

void HighPass(std::vector<double>& x, double cutoff_hz, int sample_rate) {
  const double w = std::tan(std::numbers::pi * cutoff_hz / sample_rate);
  const double k = std::numbers::sqrt2;
  const double norm = 1.0 / (1.0 + k * w + w * w);
  const double b0 = norm;
  const double b1 = -2.0 * norm;
  const double b2 = norm;
  const double a1 = 2.0 * (w * w - 1.0) * norm;
  const double a2 = (1.0 - k * w + w * w) * norm;
  double x1 = 0.0, x2 = 0.0, y1 = 0.0, y2 = 0.0;
  for (double& v : x) {
    const double y = b0 * v + b1 * x1 + b2 * x2 - a1 * y1 - a2 * y2;
    x2 = x1;
    x1 = v;
    y2 = y1;
    y1 = y;
    v = y;
  }
}

// Metres of travel over which the direction-averaged late energy of a room
// drops by 60 dB when kappa = 1, fitted over -5..-35 dB of its Schroeder
// curve.
double DecayDistance(const RoomDims& room) {
  // g(u) depends on |u| only, so one octant suffices.
  constexpr int kPolar = 32;
  constexpr int kAzimuth = 32;
  std::vector<double> rate;
  std::vector<double> weight;
  double total_weight = 0.0;
  for (int i = 0; i < kPolar; ++i) {
    const double theta = (i + 0.5) * (std::numbers::pi / 2) / kPolar;
    for (int j = 0; j < kAzimuth; ++j) {
      const double phi = (j + 0.5) * (std::numbers::pi / 2) / kAzimuth;
      rate.push_back(std::sin(theta) * std::cos(phi) / room.width +
                     std::sin(theta) * std::sin(phi) / room.length +
                     std::cos(theta) / room.height);
      weight.push_back(std::sin(theta));
      total_weight += std::sin(theta);
    }
  }
  // Schroeder curve: integral of exp(-s' g) over s' >= s is exp(-s g) / g.
  auto edc = [&](double s) {
    double acc = 0.0;
    for (size_t k = 0; k < rate.size(); ++k) {
      acc += weight[k] * std::exp(-s * rate[k]) / rate[k];
    }
    return acc / total_weight;
  };
  const double e0 = edc(0.0);
  const double mean_rate = 0.5 * (1.0 / room.width + 1.0 / room.length +
                                  1.0 / room.height);
  const double step = 0.05 / mean_rate;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int n = 0;
  for (int i = 0;; ++i) {
    const double s = i * step;
    const double db = 10.0 * std::log10(edc(s) / e0);
    if (db < -35.0) break;
    if (db <= -5.0) {
      sx += s;
      sy += db;
      sxx += s * s;
      sxy += s * db;
      ++n;
    }
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return -60.0 / slope;
}

}  // namespace

double Vec3::Norm() const { return std::sqrt(x * x + y * y + z * z); }

ArrayGeometry ArrayGeometry::Circular(double diameter) {
  ArrayGeometry g;
  const double r = diameter / 2.0;
  for (int k = 0; k < kNumMics; ++k) {
    const double phi = 90.0 * k * kDegToRad;
    g.mic_offsets[k] = {r * std::cos(phi), r * std::sin(phi), 0.0};
  }
  // cos(90 deg) is not exactly zero in floating point.
  g.mic_offsets[1].x = g.mic_offsets[3].x = 0.0;
  g.mic_offsets[2].y = 0.0;
  return g;
}

double ArrayAzimuth(const Vec3& array_center, double array_yaw_deg,
                    const Vec3& source) {
  const Vec3 d = source - array_center;
  return WrapDegrees(std::atan2(d.y, d.x) * kRadToDeg - array_yaw_deg);
}

std::array<Vec3, kNumMics> MicPositions(const RoomScene& scene,
                                        const ArrayGeometry& geom) {
  const double yaw = scene.array_yaw_deg * kDegToRad;
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  std::array<Vec3, kNumMics> out;
  for (int k = 0; k < kNumMics; ++k) {
    const Vec3& o = geom.mic_offsets[k];
    out[k] = scene.array_center + Vec3{c * o.x - s * o.y, s * o.x + c * o.y, o.z};
  }
  return out;
}

bool SceneIsValid(const RoomScene& scene, const SceneRanges& r) {
  const RoomDims& d = scene.room;
  auto in = [](double v, double lo, double hi) { return v >= lo && v <= hi; };
  if (!in(d.width, r.width_lo, r.width_hi) ||
      !in(d.length, r.length_lo, r.length_hi) ||
      !in(d.height, r.height_lo, r.height_hi) ||
      !in(scene.rt60, r.rt60_lo, r.rt60_hi)) {
    return false;
  }
  for (const Vec3& p : {scene.array_center, scene.source_position}) {
    if (!in(p.x, r.wall_margin, d.width - r.wall_margin) ||
        !in(p.y, r.wall_margin, d.length - r.wall_margin) ||
        !in(p.z, std::max(r.z_lo, r.wall_margin),
            std::min(r.z_hi, d.height - r.wall_margin))) {
      return false;
    }
  }
  if ((scene.source_position - scene.array_center).Norm() < r.min_separation) {
    return false;
  }
  const double az = ArrayAzimuth(scene.array_center, scene.array_yaw_deg,
                                 scene.source_position);
  return std::abs(WrapDegrees(az - scene.azimuth_deg)) < 1e-9;
}

RoomScene SampleScene(RngStream& rng, const SceneRanges& r) {
  RoomScene scene;
  scene.room = {rng.Uniform(r.width_lo, r.width_hi),
                rng.Uniform(r.length_lo, r.length_hi),
                rng.Uniform(r.height_lo, r.height_hi)};
  scene.rt60 = rng.Uniform(r.rt60_lo, r.rt60_hi);
  scene.array_yaw_deg = rng.Uniform(0.0, 360.0);
  const RoomDims& d = scene.room;
  const double z_hi = std::min(r.z_hi, d.height - r.wall_margin);
  auto draw = [&]() {
    return Vec3{rng.Uniform(r.wall_margin, d.width - r.wall_margin),
                rng.Uniform(r.wall_margin, d.length - r.wall_margin),
                rng.Uniform(r.z_lo, z_hi)};
  };
  for (int attempt = 0; attempt < 1000; ++attempt) {
    scene.array_center = draw();
    scene.source_position = draw();
    if ((scene.source_position - scene.array_center).Norm() >= r.min_separation) {
      scene.azimuth_deg = ArrayAzimuth(scene.array_center, scene.array_yaw_deg,
                                       scene.source_position);
      return scene;
    }
  }
  throw Error(ErrorKind::kSampling,
              "could not place source and array after 1000 attempts");
}

void PlaceSource(RoomScene& scene, double azimuth_deg, double distance,
                 double height) {
  const double phi = (azimuth_deg + scene.array_yaw_deg) * kDegToRad;
  scene.source_position = {scene.array_center.x + distance * std::cos(phi),
                           scene.array_center.y + distance * std::sin(phi),
                           height};
  scene.azimuth_deg = WrapDegrees(azimuth_deg);
}

double Rt60ToAbsorption(double rt60, const RoomDims& room) {
  if (!(rt60 > 0.0)) {
    throw Error(ErrorKind::kConfig, "rt60 must be positive");
  }
  return std::min(1.0, 0.161 * room.Volume() / (rt60 * room.SurfaceArea()));
}

double CalibratedAbsorption(double rt60, const RoomDims& room) {
  if (!(rt60 > 0.0)) {
    throw Error(ErrorKind::kConfig, "rt60 must be positive");
  }
  const double kappa = DecayDistance(room) / (kSpeedOfSound * rt60);
  return 1.0 - std::exp(-kappa);
}

Rir SimulateRir(const RoomScene& scene, const ArrayGeometry& geom,
                const RirOptions& options) {
  const int fs = options.sample_rate;
  const double c = options.speed_of_sound;
  const double absorption =
      options.calibrate_absorption ? CalibratedAbsorption(scene.rt60, scene.room)
                                   : Rt60ToAbsorption(scene.rt60, scene.room);
  const double beta = std::sqrt(1.0 - absorption);
  const double seconds =
      options.length_seconds > 0.0 ? options.length_seconds : scene.rt60;
  const auto mics = MicPositions(scene, geom);
  const Vec3& src = scene.source_position;

  int length = static_cast<int>(std::ceil(seconds * fs));
  if (options.max_order >= 0) {
    // Make room for the direct path even when the requested length is short.
    double farthest = 0.0;
    for (const Vec3& m : mics) farthest = std::max(farthest, (src - m).Norm());
    length = std::max(length,
                      static_cast<int>(std::ceil(farthest / c * fs)) + kHalfTaps + 1);
  }
  const double reach = (length - 1) * c / fs;
  const std::vector<double>& table = SincTable();

  Rir rir;
  rir.sample_rate = fs;
  // acc[q][n]: amplitude arriving at n + q / kPhases samples.
  std::vector<double> acc(static_cast<size_t>(kPhases + 1) * length);
  std::vector<double> beta_pow;
  for (int k = 0; k < kNumMics; ++k) {
    std::fill(acc.begin(), acc.end(), 0.0);
    const Vec3& m = mics[k];
    const auto xs = AxisImages(m.x, src.x, scene.room.width, reach, options.max_order);
    const auto ys = AxisImages(m.y, src.y, scene.room.length, reach, options.max_order);
    const auto zs = AxisImages(m.z, src.z, scene.room.height, reach, options.max_order);
    int max_refl = 0;
    for (const auto* axis : {&xs, &ys, &zs}) {
      int mx = 0;
      for (const AxisImage& im : *axis) mx = std::max(mx, im.reflections);
      max_refl += mx;
    }
    if (static_cast<int>(beta_pow.size()) <= max_refl) {
      beta_pow.resize(max_refl + 1);
      for (int i = 0; i <= max_refl; ++i) beta_pow[i] = std::pow(beta, i);
    }
    const double reach2 = reach * reach;
    for (const AxisImage& ix : xs) {
      const double dx2 = ix.offset * ix.offset;
      if (dx2 > reach2) continue;
      for (const AxisImage& iy : ys) {
        const double dxy2 = dx2 + iy.offset * iy.offset;
        if (dxy2 > reach2) continue;
        for (const AxisImage& iz : zs) {
          const int order = ix.reflections + iy.reflections + iz.reflections;
          if (options.max_order >= 0 && order > options.max_order) continue;
          const double d2 = dxy2 + iz.offset * iz.offset;
          if (d2 > reach2) continue;
          const double dist = std::sqrt(d2);
          const double delay = dist / c * fs;
          const int n0 = static_cast<int>(std::floor(delay));
          if (n0 >= length) continue;
          const double pos = (delay - n0) * kPhases;
          const int q0 = std::min(static_cast<int>(pos), kPhases - 1);
          const double w = pos - q0;
          const double amp = beta_pow[order] / dist;
          acc[static_cast<size_t>(q0) * length + n0] += (1.0 - w) * amp;
          acc[static_cast<size_t>(q0 + 1) * length + n0] += w * amp;
        }
      }
    }
    std::vector<double>& out = rir.taps[k];
    out.assign(length, 0.0);
    for (int q = 0; q <= kPhases; ++q) {
      const double* h = table.data() + q * kSincTaps;
      const double* row = acc.data() + static_cast<size_t>(q) * length;
      for (int n0 = 0; n0 < length; ++n0) {
        const double a = row[n0];
        if (a == 0.0) continue;
        const int t0 = n0 - kHalfTaps;
        const int i_lo = std::max(0, -t0);
        const int i_hi = std::min(kSincTaps, length - t0);
        for (int i = i_lo; i < i_hi; ++i) out[t0 + i] += a * h[i];
      }
    }
    if (options.high_pass_hz > 0.0) HighPass(out, options.high_pass_hz, fs);
  }
  return rir;
}

MultiChannelWaveform ConvolveRir(const Rir& rir, std::span<const double> source) {
  const int rir_len = static_cast<int>(rir.taps[0].size());
  const int src_len = static_cast<int>(source.size());
  const int out_len = src_len + rir_len - 1;
  const int n = NextPowerOfTwo(out_len);
  const RealFft fft(n);
  std::vector<double> buf(n, 0.0);
  std::copy(source.begin(), source.end(), buf.begin());
  std::vector<std::complex<double>> src_spec(fft.num_bins());
  fft.Forward(buf, src_spec);
  std::vector<std::complex<double>> spec(fft.num_bins());
  MultiChannelWaveform out(kNumMics, out_len, rir.sample_rate);
  for (int k = 0; k < kNumMics; ++k) {
    std::fill(buf.begin(), buf.end(), 0.0);
    std::copy(rir.taps[k].begin(), rir.taps[k].end(), buf.begin());
    fft.Forward(buf, spec);
    for (int b = 0; b < fft.num_bins(); ++b) spec[b] *= src_spec[b];
    fft.Inverse(spec, buf);
    auto dst = out.channel(k);
    for (int i = 0; i < out_len; ++i) dst[i] = buf[i] / n;
  }
  return out;
}

MultiChannelWaveform RenderScene(const RoomScene& scene,
                                 const ArrayGeometry& geom,
                                 std::span<const double> source,
                                 const RirOptions& options) {
  return PeakNormalize(ConvolveRir(SimulateRir(scene, geom, options), source),
                       kRenderPeak);
}

std::vector<double> SynthSource(int class_id, double duration_seconds,
                                RngStream& rng, int sample_rate) {
  if (class_id < 0 || class_id >= kMaxSynthClasses) {
    throw Error(ErrorKind::kConfig, "synthetic class id " +
                                        std::to_string(class_id) +
                                        " out of range [0, 20)");
  }
  const int n = static_cast<int>(std::lround(duration_seconds * sample_rate));
  std::vector<double> out(n, 0.0);
  if (n == 0) return out;
  const double two_pi = 2.0 * std::numbers::pi;
  const double nyquist_guard = 0.47 * sample_rate;

  // Class profile.
  const double f0 = 110.0 * std::pow(2.0, 0.25 * class_id) *
                    (1.0 + rng.Uniform(-0.04, 0.04));
  const double tilt = 0.6 + 0.6 * (class_id % 3);
  const double am_rate = 1.5 + 1.1 * (class_id % 5);
  const double band_center = 200.0 * std::pow(2.0, 0.26 * ((class_id * 7) % 20));

  std::vector<double> harmonic(n, 0.0);
  for (int h = 1; h * f0 < nyquist_guard && h <= 40; ++h) {
    const double amp = std::pow(static_cast<double>(h), -tilt);
    const double phase = rng.Uniform(0.0, two_pi);
    const double w = two_pi * h * f0 / sample_rate;
    for (int i = 0; i < n; ++i) harmonic[i] += amp * std::sin(w * i + phase);
  }
  const double am_phase = rng.Uniform(0.0, two_pi);
  for (int i = 0; i < n; ++i) {
    harmonic[i] *= 1.0 + 0.5 * std::sin(two_pi * am_rate * i / sample_rate + am_phase);
  }

  // Band-limited noise, one octave around the class band.
  const int fft_n = NextPowerOfTwo(n);
  const RealFft fft(fft_n);
  std::vector<double> noise(fft_n, 0.0);
  for (int i = 0; i < n; ++i) noise[i] = rng.Normal();
  std::vector<std::complex<double>> spec(fft.num_bins());
  fft.Forward(noise, spec);
  const double lo = band_center / std::numbers::sqrt2;
  const double hi = band_center * std::numbers::sqrt2;
  for (int b = 0; b < fft.num_bins(); ++b) {
    const double f = static_cast<double>(b) * sample_rate / fft_n;
    if (f < lo || f > hi) spec[b] = 0.0;
  }
  std::vector<double> band(fft_n);
  fft.Inverse(spec, band);

  std::vector<double> floor_noise(n);
  for (int i = 0; i < n; ++i) floor_noise[i] = rng.Normal();

  auto rms = [n](const std::vector<double>& v) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += v[i] * v[i];
    return std::sqrt(s / n) + 1e-12;
  };
  const double g_harm = 1.0 / rms(harmonic);
  const double g_band = 0.5 / rms(band);
  const double g_floor = 0.1 / rms(floor_noise);
  for (int i = 0; i < n; ++i) {
    out[i] = g_harm * harmonic[i] + g_band * band[i] + g_floor * floor_noise[i];
  }
  double peak = 0.0;
  for (double v : out) peak = std::max(peak, std::abs(v));
  for (double& v : out) v /= peak;
  return out;
}

}  // namespace spatialcl
