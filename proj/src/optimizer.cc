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

#include "spatialcl/optimizer.h"

#include <cmath>
#include <numbers>

#include "spatialcl/errors.h"

namespace spatialcl {

template <typename T>
void SgdStep(ParamList<T>* params, const ParamList<T>& grads,
             OptimizerState<T>* state, double lr, uint32_t groups) {
  if (grads.size() != params->size() ||
      state->velocity.size() != params->size()) {
    throw Error(ErrorKind::kSize, "optimizer: parameter list mismatch");
  }
  for (size_t i = 0; i < grads.size(); ++i) {
    const Param<T>& g = grads[i];
    if ((groups & GroupBit((*params)[i].group)) == 0) continue;
    if (g.size() != (*params)[i].size() ||
        state->velocity[i].size() != g.size()) {
      throw Error(ErrorKind::kSize, "optimizer: shape mismatch for " + g.name);
    }
    size_t bad = 0;
    for (T v : g.value) bad += !std::isfinite(v);
    if (bad > 0) {
      throw Error(ErrorKind::kNumeric,
                  "non-finite gradient in " + g.name + " (" +
                      std::to_string(bad) + " of " + std::to_string(g.size()) +
                      " entries)");
    }
  }
  const T mu = static_cast<T>(state->config.momentum);
  const T step = static_cast<T>(lr);
  for (size_t i = 0; i < grads.size(); ++i) {
    const ParamGroup group = (*params)[i].group;
    if ((groups & GroupBit(group)) == 0) continue;
    const T wd = static_cast<T>(
        state->config.weight_decay *
        state->config.group_decay_scale[static_cast<int>(group)]);
    T* p = (*params)[i].value.data();
    T* v = state->velocity[i].value.data();
    const T* g = grads[i].value.data();
    const size_t n = grads[i].size();
    for (size_t j = 0; j < n; ++j) {
      v[j] = mu * v[j] + g[j] + wd * p[j];
      p[j] -= step * v[j];
    }
  }
}

double LrAt(int epoch, const LrSchedule& s) {
  if (epoch < s.warmup_epochs) {
    return s.base_lr * (epoch + 1) / s.warmup_epochs;
  }
  const int span = s.total_epochs - s.warmup_epochs;
  if (span <= 0) return s.base_lr;
  return s.base_lr * 0.5 *
         (1.0 + std::cos(std::numbers::pi * (epoch - s.warmup_epochs) / span));
}

template <typename T>
void GradScale(ParamList<T>* grads, ParamGroup group, double factor) {
  if (factor == 1.0) return;
  const T f = static_cast<T>(factor);
  for (Param<T>& g : *grads) {
    if (g.group != group) continue;
    for (T& v : g.value) v *= f;
  }
}

template void SgdStep<float>(ParamList<float>*, const ParamList<float>&,
                             OptimizerState<float>*, double, uint32_t);
template void SgdStep<double>(ParamList<double>*, const ParamList<double>&,
                              OptimizerState<double>*, double,
                              uint32_t);
template void GradScale<float>(ParamList<float>*, ParamGroup, double);
template void GradScale<double>(ParamList<double>*, ParamGroup, double);

}  // namespace spatialcl
