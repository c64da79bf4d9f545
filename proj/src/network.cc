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

#include "spatialcl/network.h"

#include <cmath>
#include <string>

#include "spatialcl/errors.h"
#include "spatialcl/layers.h"

namespace spatialcl {
namespace {

template <typename T>
Param<T> MakeParam(std::string name, ParamGroup group, std::vector<int> shape) {
  size_t n = 1;
  for (int d : shape) n *= d;
  return {std::move(name), group, std::move(shape), std::vector<T>(n, T(0))};
}

template <typename T>
void KaimingUniform(Param<T>& p, int fan_in, RngStream rng) {
  const double bound = std::sqrt(6.0 / fan_in);
  for (T& v : p.value) v = static_cast<T>(rng.Uniform(-bound, bound));
}

void CheckInput(const NetworkConfig& c, int n, int ch, int h, int w) {
  if (ch != c.in_channels || h != c.height || w != c.width || n < 1) {
    throw Error(ErrorKind::kSize,
                "encoder expects [n x " + std::to_string(c.in_channels) + " x " +
                    std::to_string(c.height) + " x " + std::to_string(c.width) +
                    "], got [" + std::to_string(n) + " x " + std::to_string(ch) +
                    " x " + std::to_string(h) + " x " + std::to_string(w) + "]");
  }
}

}  // namespace

void NetworkConfig::Validate() const {
  if (in_channels < 1 || height < 8 || width < 8 || embedding_dim < 1 ||
      projection_dim < 1 || num_classes < 1) {
    throw Error(ErrorKind::kConfig, "invalid network configuration");
  }
  for (int c : conv_widths) {
    if (c < 1) throw Error(ErrorKind::kConfig, "conv widths must be positive");
  }
}

template <typename T>
Network<T> Network<T>::Initialize(const NetworkConfig& config, uint64_t seed) {
  config.Validate();
  Network<T> net;
  net.config = config;
  auto& ps = net.params;
  int cin = config.in_channels;
  for (int i = 0; i < 3; ++i) {
    const int cout = config.conv_widths[i];
    const std::string prefix = "conv" + std::to_string(i + 1);
    ps.push_back(MakeParam<T>(prefix + ".weight", ParamGroup::kEncoder,
                              {cout, cin, 3, 3}));
    ps.push_back(MakeParam<T>(prefix + ".bias", ParamGroup::kEncoder, {cout}));
    cin = cout;
  }
  const int e = config.embedding_dim, p = config.projection_dim;
  auto linear = [&](const std::string& name, ParamGroup g, int out, int in) {
    ps.push_back(MakeParam<T>(name + ".weight", g, {out, in}));
    ps.push_back(MakeParam<T>(name + ".bias", g, {out}));
  };
  linear("embed", ParamGroup::kEncoder, e, cin);
  linear("proj1", ParamGroup::kProjector, p, e);
  linear("proj2", ParamGroup::kProjector, p, p);
  linear("classifier", ParamGroup::kClassifier, config.num_classes, e);
  linear("localizer", ParamGroup::kLocalizer, 2, e);

  const RngStream root(seed);
  for (int i = 0; i < kNumParams; i += 2) {
    const std::vector<int>& shape = ps[i].shape;
    int fan_in = 1;
    for (size_t d = 1; d < shape.size(); ++d) fan_in *= shape[d];
    KaimingUniform(ps[i], fan_in, root.Split(i));
  }
  return net;
}

template <typename T>
void EncoderForward(const Network<T>& net, const Batch<T>& x,
                    std::vector<T>* embeddings,
                    std::type_identity_t<EncoderTape<T>>* tape) {
  const NetworkConfig& cfg = net.config;
  CheckInput(cfg, x.n, x.c, x.h, x.w);
  const int n = x.n;
  EncoderTape<T> local;
  EncoderTape<T>& t = tape != nullptr ? *tape : local;
  if (tape != nullptr) t.input = x;
  const T* in = x.data.data();
  int cin = cfg.in_channels, h = cfg.height, w = cfg.width;
  for (int i = 0; i < 3; ++i) {
    const int cout = cfg.conv_widths[i];
    std::vector<T>& conv = t.conv[i];
    conv.resize(static_cast<size_t>(n) * cout * h * w);
    layers::Conv3x3Forward(n, cin, cout, h, w, in, net.data(2 * i),
                           net.data(2 * i + 1), conv.data());
    layers::ReluForward(conv.size(), conv.data(), conv.data());
    std::vector<T>& pooled = t.pooled[i];
    pooled.resize(static_cast<size_t>(n) * cout * (h / 2) * (w / 2));
    layers::AvgPool2x2Forward(n * cout, h, w, conv.data(), pooled.data());
    in = pooled.data();
    cin = cout;
    h /= 2;
    w /= 2;
  }
  t.global.resize(static_cast<size_t>(n) * cin);
  layers::GlobalAvgPoolForward(n * cin, h * w, in, t.global.data());
  embeddings->resize(static_cast<size_t>(n) * cfg.embedding_dim);
  layers::LinearForward(n, cin, cfg.embedding_dim, t.global.data(),
                        net.data(kEmbedW), net.data(kEmbedB),
                        embeddings->data());
}

template <typename T>
void EncoderBackward(const Network<T>& net, const EncoderTape<T>& tape,
                     const std::vector<T>& d_embeddings, ParamList<T>* grads,
                     std::type_identity_t<Batch<T>>* dx) {
  const NetworkConfig& cfg = net.config;
  const int n = tape.input.n;
  auto g = [&](int i) { return (*grads)[i].value.data(); };
  std::array<int, 4> hs, ws;
  hs[0] = cfg.height;
  ws[0] = cfg.width;
  for (int i = 1; i < 4; ++i) {
    hs[i] = hs[i - 1] / 2;
    ws[i] = ws[i - 1] / 2;
  }
  const int c3 = cfg.conv_widths[2];
  std::vector<T> d_global(static_cast<size_t>(n) * c3);
  layers::LinearBackward(n, c3, cfg.embedding_dim, tape.global.data(),
                         net.data(kEmbedW), d_embeddings.data(), g(kEmbedW),
                         g(kEmbedB), d_global.data());
  std::vector<T> d_pooled(tape.pooled[2].size());
  layers::GlobalAvgPoolBackward(n * c3, hs[3] * ws[3], d_global.data(),
                                d_pooled.data());
  std::vector<T> d_conv;
  for (int i = 2; i >= 0; --i) {
    const int cout = cfg.conv_widths[i];
    const int cin = i == 0 ? cfg.in_channels : cfg.conv_widths[i - 1];
    d_conv.resize(tape.conv[i].size());
    layers::AvgPool2x2Backward(n * cout, hs[i], ws[i], d_pooled.data(),
                               d_conv.data());
    layers::ReluBackward(d_conv.size(), tape.conv[i].data(), d_conv.data(),
                         d_conv.data());
    const T* in = i == 0 ? tape.input.data.data() : tape.pooled[i - 1].data();
    T* d_in = nullptr;
    if (i > 0) {
      d_pooled.resize(tape.pooled[i - 1].size());
      d_in = d_pooled.data();
    } else if (dx != nullptr) {
      *dx = Batch<T>(n, cin, hs[0], ws[0]);
      d_in = dx->data.data();
    }
    layers::Conv3x3Backward(n, cin, cout, hs[i], ws[i], in, net.data(2 * i),
                            d_conv.data(), g(2 * i), g(2 * i + 1), d_in);
  }
}

template <typename T>
void ProjectorForward(const Network<T>& net, int n, const T* embeddings,
                      std::vector<T>* projections,
                      std::type_identity_t<ProjectorTape<T>>* tape) {
  const int e = net.config.embedding_dim, p = net.config.projection_dim;
  ProjectorTape<T> local;
  ProjectorTape<T>& t = tape != nullptr ? *tape : local;
  t.n = n;
  t.embedding.assign(embeddings, embeddings + static_cast<size_t>(n) * e);
  t.hidden.resize(static_cast<size_t>(n) * p);
  layers::LinearForward(n, e, p, embeddings, net.data(kProj1W),
                        net.data(kProj1B), t.hidden.data());
  layers::ReluForward(t.hidden.size(), t.hidden.data(), t.hidden.data());
  projections->resize(static_cast<size_t>(n) * p);
  layers::LinearForward(n, p, p, t.hidden.data(), net.data(kProj2W),
                        net.data(kProj2B), projections->data());
}

template <typename T>
void ProjectorBackward(const Network<T>& net, const ProjectorTape<T>& tape,
                       const std::vector<T>& d_projections, ParamList<T>* grads,
                       std::type_identity_t<std::vector<T>>* d_embeddings) {
  const int n = tape.n;
  const int e = net.config.embedding_dim, p = net.config.projection_dim;
  auto g = [&](int i) { return (*grads)[i].value.data(); };
  std::vector<T> d_hidden(tape.hidden.size());
  layers::LinearBackward(n, p, p, tape.hidden.data(), net.data(kProj2W),
                         d_projections.data(), g(kProj2W), g(kProj2B),
                         d_hidden.data());
  layers::ReluBackward(d_hidden.size(), tape.hidden.data(), d_hidden.data(),
                       d_hidden.data());
  T* d_in = nullptr;
  if (d_embeddings != nullptr) {
    d_embeddings->resize(static_cast<size_t>(n) * e);
    d_in = d_embeddings->data();
  }
  layers::LinearBackward(n, e, p, tape.embedding.data(), net.data(kProj1W),
                         d_hidden.data(), g(kProj1W), g(kProj1B), d_in);
}

template <typename T>
void HeadsForward(const Network<T>& net, int n, const T* embeddings,
                  std::vector<T>* logits, std::vector<T>* direction) {
  const int e = net.config.embedding_dim, k = net.config.num_classes;
  logits->resize(static_cast<size_t>(n) * k);
  direction->resize(static_cast<size_t>(n) * 2);
  layers::LinearForward(n, e, k, embeddings, net.data(kClassW),
                        net.data(kClassB), logits->data());
  layers::LinearForward(n, e, 2, embeddings, net.data(kLocW), net.data(kLocB),
                        direction->data());
}

template <typename T>
void HeadsBackward(const Network<T>& net, int n, const T* embeddings,
                   const std::vector<T>& d_logits,
                   const std::vector<T>& d_direction, ParamList<T>* grads,
                   std::type_identity_t<std::vector<T>>* d_embeddings) {
  const int e = net.config.embedding_dim, k = net.config.num_classes;
  auto g = [&](int i) { return (*grads)[i].value.data(); };
  std::vector<T> d_a, d_b;
  const bool want_dx = d_embeddings != nullptr;
  if (want_dx) {
    d_a.resize(static_cast<size_t>(n) * e);
    d_b.resize(d_a.size());
  }
  layers::LinearBackward(n, e, k, embeddings, net.data(kClassW),
                         d_logits.data(), g(kClassW), g(kClassB),
                         want_dx ? d_a.data() : nullptr);
  layers::LinearBackward(n, e, 2, embeddings, net.data(kLocW),
                         d_direction.data(), g(kLocW), g(kLocB),
                         want_dx ? d_b.data() : nullptr);
  if (want_dx) {
    for (size_t i = 0; i < d_a.size(); ++i) d_a[i] += d_b[i];
    *d_embeddings = std::move(d_a);
  }
}

#define SPATIALCL_INSTANTIATE(T)                                               \
  template struct Network<T>;                                                  \
  template void EncoderForward<T>(const Network<T>&, const Batch<T>&,          \
                                  std::vector<T>*, EncoderTape<T>*);           \
  template void EncoderBackward<T>(const Network<T>&, const EncoderTape<T>&,   \
                                   const std::vector<T>&, ParamList<T>*,       \
                                   Batch<T>*);                                 \
  template void ProjectorForward<T>(const Network<T>&, int, const T*,          \
                                    std::vector<T>*, ProjectorTape<T>*);       \
  template void ProjectorBackward<T>(const Network<T>&, const ProjectorTape<T>&, \
                                     const std::vector<T>&, ParamList<T>*,     \
                                     std::vector<T>*);                         \
  template void HeadsForward<T>(const Network<T>&, int, const T*,              \
                                std::vector<T>*, std::vector<T>*);             \
  template void HeadsBackward<T>(const Network<T>&, int, const T*,             \
                                 const std::vector<T>&, const std::vector<T>&, \
                                 ParamList<T>*, std::vector<T>*);

SPATIALCL_INSTANTIATE(float)
SPATIALCL_INSTANTIATE(double)
#undef SPATIALCL_INSTANTIATE

}  // namespace spatialcl
