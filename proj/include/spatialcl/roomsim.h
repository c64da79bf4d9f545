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

#ifndef SPATIALCL_ROOMSIM_H_
#define SPATIALCL_ROOMSIM_H_

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "spatialcl/rng.h"
#include "spatialcl/waveform.h"

namespace spatialcl {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  double Norm() const;
  bool operator==(const Vec3&) const = default;
};

struct RoomDims {
  double width = 6.0;   // x
  double length = 5.0;  // y
  double height = 3.0;  // z

  double Volume() const { return width * length * height; }
  double SurfaceArea() const {
    return 2.0 * (width * length + width * height + length * height);
  }
};

inline constexpr double kSpeedOfSound = 343.0;
inline constexpr int kNumMics = 4;

// Mic offsets from the array center in the array frame. Mic k sits at
// azimuth 90k degrees, counterclockwise, in the horizontal plane.
struct ArrayGeometry {
  std::array<Vec3, kNumMics> mic_offsets;

  static ArrayGeometry Circular(double diameter = 0.1);
};

struct RoomScene {
  RoomDims room;
  double rt60 = 0.5;
  Vec3 array_center;
  double array_yaw_deg = 0.0;
  Vec3 source_position;
  double azimuth_deg = 0.0;  // source direction in the array frame
  int class_label = 0;
};

// Sampling ranges for SampleScene.
struct SceneRanges {
  double width_lo = 3.0, width_hi = 10.0;
  double length_lo = 3.0, length_hi = 10.0;
  double height_lo = 2.5, height_hi = 4.0;
  double rt60_lo = 0.1, rt60_hi = 1.0;
  double z_lo = 0.5, z_hi = 2.0;
  double wall_margin = 0.5;
  double min_separation = 0.5;
};

// Planar angle of (source - array center) in the array frame, wrapped to
// (-180, 180].
double ArrayAzimuth(const Vec3& array_center, double array_yaw_deg,
                    const Vec3& source);

// Mic positions in room coordinates.
std::array<Vec3, kNumMics> MicPositions(const RoomScene& scene,
                                        const ArrayGeometry& geom);

// Rejection-samples a scene satisfying the placement constraints (1000
// attempts, then kSampling).
RoomScene SampleScene(RngStream& rng, const SceneRanges& ranges = {});

// True when every RoomScene placement invariant holds for `ranges`.
bool SceneIsValid(const RoomScene& scene, const SceneRanges& ranges = {});

// Moves the source to the given array-frame azimuth, horizontal distance and
// height, and updates the azimuth label.
void PlaceSource(RoomScene& scene, double azimuth_deg, double distance,
                 double height);

// Sabine: a = min(1, 0.161 V / (rt60 S)).
double Rt60ToAbsorption(double rt60, const RoomDims& room);

// Wall absorption for which the image-source model itself decays by 60 dB
// in rt60 seconds. A shoebox with uniform absorption is not a diffuse
// field: energy travelling along the long axes meets fewer walls, so the
// Sabine value leaves the simulated decay too slow. The late energy arriving
// from direction u decays as exp(-kappa * s * g(u)) after s metres of
// travel, with g(u) = |ux|/W + |uy|/L + |uz|/H and (1 - a) = exp(-kappa);
// the decay distance of the direction-averaged Schroeder curve fixes kappa.
double CalibratedAbsorption(double rt60, const RoomDims& room);

struct RirOptions {
  // Highest total reflection count; negative means images out to the RIR
  // length.
  int max_order = -1;
  // RIR length; non-positive means rt60.
  double length_seconds = 0.0;
  int sample_rate = kWorkingSampleRate;
  double speed_of_sound = kSpeedOfSound;
  // Use CalibratedAbsorption; false falls back to Rt60ToAbsorption.
  bool calibrate_absorption = true;
  // Second-order Butterworth high-pass applied to every RIR. Removes the DC
  // build-up of the all-positive image pulses; <= 0 disables it.
  double high_pass_hz = 50.0;
};

struct Rir {
  int sample_rate = kWorkingSampleRate;
  std::array<std::vector<double>, kNumMics> taps;
};

inline constexpr int kSincTaps = 81;

// Image-source method for a rigid shoebox room with uniform absorption. Each
// image contributes beta^reflections / distance through an 81-tap
// Hann-windowed sinc at its fractional delay.
Rir SimulateRir(const RoomScene& scene, const ArrayGeometry& geom,
                const RirOptions& options = {});

// Per-mic linear convolution of `source` with the RIR, length
// source + rir - 1. No normalization.
MultiChannelWaveform ConvolveRir(const Rir& rir, std::span<const double> source);

inline constexpr double kRenderPeak = 0.9;

// ConvolveRir followed by peak normalization to kRenderPeak.
MultiChannelWaveform RenderScene(const RoomScene& scene,
                                 const ArrayGeometry& geom,
                                 std::span<const double> source,
                                 const RirOptions& options = {});

inline constexpr int kMaxSynthClasses = 20;

// Class-conditioned test signal: a harmonic stack with class-specific
// fundamental, spectral tilt and amplitude modulation, plus band-limited
// noise at a class-specific band and a weak broadband floor. Peak 1.
std::vector<double> SynthSource(int class_id, double duration_seconds,
                                RngStream& rng,
                                int sample_rate = kWorkingSampleRate);

}  // namespace spatialcl

#endif  // SPATIALCL_ROOMSIM_H_
