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

#ifndef SPATIALCL_NETWORK_H_
#define SPATIALCL_NETWORK_H_

// The fixed model: a three-block convolutional encoder producing a
// 128-dimensional embedding, a two-layer projector used only during
// contrastive pre-training, and two linear heads (class logits and an
// azimuth unit vector) used for supervised evaluation.

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>
#include <type_traits>
#include <vector>

#include "spatialcl/rng.h"

namespace spatialcl {

enum class ParamGroup : uint8_t {
  kEncoder = 0,
  kProjector = 1,
  kClassifier = 2,
  kLocalizer = 3,
};

template <typename T>
struct Param {
  std::string name;
  ParamGroup group = ParamGroup::kEncoder;
  std::vector<int> shape;
  std::vector<T> value;

  size_t size() const { return value.size(); }
};

template <typename T>
using ParamList = std::vector<Param<T>>;

// Same names and shapes, all values zero.
template <typename T>
ParamList<T> ZerosLike(const ParamList<T>& params) {
  ParamList<T> out = params;
  for (Param<T>& p : out) std::fill(p.value.begin(), p.value.end(), T(0));
  return out;
}

struct NetworkConfig {
  int in_channels = 10;
  int height = 64;  // feature bins
  int width = 96;   // frames
  std::array<int, 3> conv_widths = {32, 64, 128};
  int embedding_dim = 128;
  int projection_dim = 128;
  int num_classes = 8;

  void Validate() const;
  bool operator==(const NetworkConfig&) const = default;
};

// Indices into Network::params.
enum ParamIndex : int {
  kConv1W, kConv1B, kConv2W, kConv2B, kConv3W, kConv3B,
  kEmbedW, kEmbedB,
  kProj1W, kProj1B, kProj2W, kProj2B,
  kClassW, kClassB, kLocW, kLocB,
  kNumParams,
};

template <typename T>
struct Network {
  NetworkConfig config;
  ParamList<T> params;

  // Kaiming-uniform fan-in weights, zero biases.
  static Network Initialize(const NetworkConfig& config, uint64_t seed);

  const T* data(int index) const { return params[index].value.data(); }

  template <typename U>
  Network<U> Cast() const {
    Network<U> out;
    out.config = config;
    for (const Param<T>& p : params) {
      out.params.push_back({p.name, p.group, p.shape,
                            std::vector<U>(p.value.begin(), p.value.end())});
    }
    return out;
  }
};

// Dense NCHW batch.
template <typename T>
struct Batch {
  int n = 0, c = 0, h = 0, w = 0;
  std::vector<T> data;

  Batch() = default;
  Batch(int n_, int c_, int h_, int w_)
      : n(n_), c(c_), h(h_), w(w_),
        data(static_cast<size_t>(n_) * c_ * h_ * w_, T(0)) {}
  size_t sample_size() const { return static_cast<size_t>(c) * h * w; }
  T* sample(int i) { return data.data() + i * sample_size(); }
  const T* sample(int i) const { return data.data() + i * sample_size(); }
};

// Activations saved by EncoderForward for EncoderBackward.
template <typename T>
struct EncoderTape {
  Batch<T> input;
  std::array<std::vector<T>, 3> conv;    // post-ReLU
  std::array<std::vector<T>, 3> pooled;
  std::vector<T> global;                 // [n x conv_widths[2]]
};

template <typename T>
struct ProjectorTape {
  int n = 0;
  std::vector<T> embedding;
  std::vector<T> hidden;  // post-ReLU
};

// embeddings: [x.n x embedding_dim]. Throws kSize when x does not match
// the configured input shape. tape may be null.
template <typename T>
void EncoderForward(const Network<T>& net, const Batch<T>& x,
                    std::vector<T>* embeddings,
                    std::type_identity_t<EncoderTape<T>>* tape);

// Overwrites the encoder entries of *grads. dx may be null.
template <typename T>
void EncoderBackward(const Network<T>& net, const EncoderTape<T>& tape,
                     const std::vector<T>& d_embeddings, ParamList<T>* grads,
                     std::type_identity_t<Batch<T>>* dx);

template <typename T>
void ProjectorForward(const Network<T>& net, int n, const T* embeddings,
                      std::vector<T>* projections,
                      std::type_identity_t<ProjectorTape<T>>* tape);

template <typename T>
void ProjectorBackward(const Network<T>& net, const ProjectorTape<T>& tape,
                       const std::vector<T>& d_projections, ParamList<T>* grads,
                       std::type_identity_t<std::vector<T>>* d_embeddings);

// logits: [n x num_classes]; direction: [n x 2] as (cos, sin).
template <typename T>
void HeadsForward(const Network<T>& net, int n, const T* embeddings,
                  std::vector<T>* logits, std::vector<T>* direction);

template <typename T>
void HeadsBackward(const Network<T>& net, int n, const T* embeddings,
                   const std::vector<T>& d_logits,
                   const std::vector<T>& d_direction, ParamList<T>* grads,
                   std::type_identity_t<std::vector<T>>* d_embeddings);

}  // namespace spatialcl

#endif  // SPATIALCL_NETWORK_H_
