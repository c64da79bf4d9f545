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

#include "spatialcl/gradcheck.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "spatialcl/errors.h"

namespace spatialcl {

std::string GradCheckResult::Describe() const {
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "max rel err %.3e over %d probes (probe %d: analytic %.9g, "
                "numeric %.9g)",
                max_relative_error, num_probes, worst_probe, worst_analytic,
                worst_numeric);
  return buf;
}

GradCheckResult CheckGradient(const std::function<double()>& loss,
                              std::span<double* const> probes,
                              std::span<const double> analytic,
                              const GradCheckOptions& options) {
  if (probes.size() != analytic.size()) {
    throw Error(ErrorKind::kSize, "gradient check: probe/analytic mismatch");
  }
  GradCheckResult result;
  result.num_probes = static_cast<int>(probes.size());
  for (size_t i = 0; i < probes.size(); ++i) {
    double& x = *probes[i];
    const double saved = x;
    x = saved + options.step;
    const double up = loss();
    x = saved - options.step;
    const double down = loss();
    x = saved;
    const double numeric = (up - down) / (2.0 * options.step);
    const double denom = std::max(
        {std::abs(analytic[i]), std::abs(numeric), options.floor});
    const double rel = std::abs(analytic[i] - numeric) / denom;
    if (rel > result.max_relative_error || result.worst_probe < 0) {
      result.max_relative_error = std::max(rel, result.max_relative_error);
      result.worst_probe = static_cast<int>(i);
      result.worst_analytic = analytic[i];
      result.worst_numeric = numeric;
    }
  }
  return result;
}

}  // namespace spatialcl
