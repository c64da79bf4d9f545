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

#ifndef SPATIALCL_NTXENT_H_
#define SPATIALCL_NTXENT_H_

#include <type_traits>
#include <vector>

namespace spatialcl {

struct NtXentConfig {
  double temperature = 0.1;
  // Norm floor used when L2-normalizing projections.
  double norm_floor = 1e-12;
};

// Normalized temperature-scaled cross entropy over `rows` = 2N projections
// of width `dim`. Rows 2m and 2m+1 are the m-th positive pair. Returns the
// mean over all 2N anchors; writes d loss / d z into *grad when non-null.
// Throws kConfig unless rows is even and at least 4, kNumeric on an
// all-zero row.
template <typename T>
double NtXent(int rows, int dim, const T* z, const NtXentConfig& cfg,
              std::type_identity_t<std::vector<T>>* grad);

}  // namespace spatialcl

#endif  // SPATIALCL_NTXENT_H_
