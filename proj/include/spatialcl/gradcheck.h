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

#ifndef SPATIALCL_GRADCHECK_H_
#define SPATIALCL_GRADCHECK_H_

#include <functional>
#include <span>
#include <string>

namespace spatialcl {

struct GradCheckOptions {
  double step = 1e-5;
  // Denominator floor, so that gradients that are zero up to rounding do not
  // blow up the relative error.
  double floor = 1e-6;
};

struct GradCheckResult {
  double max_relative_error = 0.0;
  int worst_probe = -1;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  int num_probes = 0;

  std::string Describe() const;
};

// Compares analytic[i] against the central difference of `loss` with
// respect to *probes[i]. Each probed value is restored afterwards.
GradCheckResult CheckGradient(const std::function<double()>& loss,
                              std::span<double* const> probes,
                              std::span<const double> analytic,
                              const GradCheckOptions& options = {});

}  // namespace spatialcl

#endif  // SPATIALCL_GRADCHECK_H_
