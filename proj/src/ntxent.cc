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

#include "spatialcl/ntxent.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "spatialcl/errors.h"

namespace spatialcl {

template <typename T>
double NtXent(int rows, int dim, const T* z, const NtXentConfig& cfg,
              std::type_identity_t<std::vector<T>>* grad) {
  if (rows < 4 || rows % 2 != 0 || dim < 1) {
    throw Error(ErrorKind::kConfig,
                "NT-Xent needs an even number of rows (at least two pairs)");
  }
  if (!(cfg.temperature > 0.0)) {
    throw Error(ErrorKind::kConfig, "NT-Xent temperature must be positive");
  }
  const double inv_tau = 1.0 / cfg.temperature;
  // Work in double regardless of T.
  std::vector<double> u(static_cast<size_t>(rows) * dim);
  std::vector<double> norms(rows);
  std::vector<char> floored(rows, 0);
  for (int i = 0; i < rows; ++i) {
    const T* zi = z + static_cast<size_t>(i) * dim;
    double ss = 0.0;
    for (int d = 0; d < dim; ++d) ss += static_cast<double>(zi[d]) * zi[d];
    const double norm = std::sqrt(ss);
    if (norm == 0.0 || !std::isfinite(norm)) {
      throw Error(ErrorKind::kNumeric,
                  "NT-Xent: projection row " + std::to_string(i) +
                      (norm == 0.0 ? " has zero norm" : " is not finite"));
    }
    floored[i] = norm < cfg.norm_floor;
    norms[i] = std::max(norm, cfg.norm_floor);
    for (int d = 0; d < dim; ++d) u[i * dim + d] = zi[d] / norms[i];
  }
  // logits[i][k] = cos(u_i, u_k) / tau.
  std::vector<double> s(static_cast<size_t>(rows) * rows);
  for (int i = 0; i < rows; ++i) {
    for (int k = i; k < rows; ++k) {
      double dot = 0.0;
      for (int d = 0; d < dim; ++d) dot += u[i * dim + d] * u[k * dim + d];
      s[i * rows + k] = s[k * rows + i] = dot * inv_tau;
    }
  }
  double loss = 0.0;
  // g[i][k] = d loss / d s[i][k].
  std::vector<double> g(grad != nullptr ? s.size() : 0, 0.0);
  const double scale = 1.0 / rows;
  for (int i = 0; i < rows; ++i) {
    const int pos = i ^ 1;
    const double* si = s.data() + static_cast<size_t>(i) * rows;
    double mx = -INFINITY;
    for (int k = 0; k < rows; ++k) {
      if (k != i) mx = std::max(mx, si[k]);
    }
    double denom = 0.0;
    for (int k = 0; k < rows; ++k) {
      if (k != i) denom += std::exp(si[k] - mx);
    }
    loss += (mx + std::log(denom) - si[pos]) * scale;
    if (grad != nullptr) {
      double* gi = g.data() + static_cast<size_t>(i) * rows;
      for (int k = 0; k < rows; ++k) {
        if (k != i) gi[k] = std::exp(si[k] - mx) / denom * scale;
      }
      gi[pos] -= scale;
    }
  }
  if (grad != nullptr) {
    // d loss / d u_i = (sum_k (g[i][k] + g[k][i]) u_k) / tau, then through
    // the normalization: (I - u u^T) / |z|.
    grad->assign(static_cast<size_t>(rows) * dim, T(0));
    std::vector<double> du(dim);
    for (int i = 0; i < rows; ++i) {
      std::fill(du.begin(), du.end(), 0.0);
      for (int k = 0; k < rows; ++k) {
        const double w = (g[i * rows + k] + g[k * rows + i]) * inv_tau;
        if (w == 0.0) continue;
        for (int d = 0; d < dim; ++d) du[d] += w * u[k * dim + d];
      }
      const double* ui = u.data() + static_cast<size_t>(i) * dim;
      double proj = 0.0;
      if (!floored[i]) {
        for (int d = 0; d < dim; ++d) proj += ui[d] * du[d];
      }
      T* out = grad->data() + static_cast<size_t>(i) * dim;
      for (int d = 0; d < dim; ++d) {
        out[d] = static_cast<T>((du[d] - ui[d] * proj) / norms[i]);
      }
    }
  }
  return loss;
}

template double NtXent<float>(int, int, const float*, const NtXentConfig&,
                              std::vector<float>*);
template double NtXent<double>(int, int, const double*, const NtXentConfig&,
                               std::vector<double>*);

}  // namespace spatialcl
