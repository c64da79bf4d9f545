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

#ifndef SPATIALCL_OPTIMIZER_H_
#define SPATIALCL_OPTIMIZER_H_

#include <array>
#include <cstdint>

#include "spatialcl/network.h"

namespace spatialcl {

struct SgdConfig {
  double momentum = 0.9;
  double weight_decay = 1e-4;
  // Per-group multiplier on weight_decay, indexed by ParamGroup. Set to the
  // gradient scale of a group so that its whole update scales with it.
  std::array<double, 4> group_decay_scale = {1.0, 1.0, 1.0, 1.0};
};

constexpr uint32_t GroupBit(ParamGroup g) {
  return 1u << static_cast<int>(g);
}
inline constexpr uint32_t kAllGroups = 0xF;

template <typename T>
struct OptimizerState {
  SgdConfig config;
  ParamList<T> velocity;

  static OptimizerState Zeros(const ParamList<T>& params,
                              const SgdConfig& config = {}) {
    return {config, ZerosLike(params)};
  }
};

// v = momentum * v + grad + weight_decay * param; param -= lr * v.
// Only parameters whose group bit is in `groups` are touched. Throws
// kNumeric naming the parameter if any gradient is non-finite; in that case
// nothing is modified.
template <typename T>
void SgdStep(ParamList<T>* params, const ParamList<T>& grads,
             OptimizerState<T>* state, double lr, uint32_t groups = kAllGroups);

struct LrSchedule {
  double base_lr = 0.2;
  int warmup_epochs = 10;
  int total_epochs = 500;
};

// Linear warmup to base_lr, then half-cosine decay towards zero.
double LrAt(int epoch, const LrSchedule& schedule);

// Multiplies the gradients of every parameter in `group` by factor.
template <typename T>
void GradScale(ParamList<T>* grads, ParamGroup group, double factor);

}  // namespace spatialcl

#endif  // SPATIALCL_OPTIMIZER_H_
