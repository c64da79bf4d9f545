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


#ifndef SPATIALCL_CLI_H_
#define SPATIALCL_CLI_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

#include "spatialcl/augment.h"
#include "spatialcl/dataset.h"
#include "spatialcl/eval.h"
#include "spatialcl/features.h"
#include "spatialcl/pretrain.h"

namespace spatialcl {

// Flat "section.key" -> value settings read from an INI-style file with
// sections [dataset], [features], [augment], [pretrain] and [eval]. Unknown
// keys are rejected.
class RunSettings {
 public:
  RunSettings() = default;

  // Throws kConfig naming the path when it is missing or unparsable.
  static RunSettings FromFile(const std::filesystem::path& path);

  // Throws kConfig for a key outside the documented set.
  void Set(const std::string& key, const std::string& value);
  // "section.key=value".
  void SetAssignment(const std::string& assignment);

  bool Has(const std::string& key) const { return values_.count(key) > 0; }
  std::string GetString(const std::string& key, const std::string& fallback) const;
  int GetInt(const std::string& key, int fallback) const;
  uint64_t GetU64(const std::string& key, uint64_t fallback) const;
  double GetDouble(const std::string& key, double fallback) const;
  bool GetBool(const std::string& key, bool fallback) const;

 private:
  std::map<std::string, std::string> values_;
};

// Every accepted key with a one-line description, for --help output.
const std::map<std::string, std::string>& KnownSettings();

DatasetOptions DatasetFromSettings(const RunSettings& s, uint64_t seed);
FeatureConfig FeaturesFromSettings(const RunSettings& s);
AugmentationPlan PlanFromSettings(const RunSettings& s);
PretrainConfig PretrainFromSettings(const RunSettings& s, uint64_t seed);
EvalProtocol EvalFromSettings(const RunSettings& s, EvalMode mode,
                              uint64_t seed);

// Entry point of the command-line tool. Returns 0 on success, 1 on usage or
// configuration errors, 3 on numeric failures and 2 on any other error.
int CliMain(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace spatialcl

#endif  // SPATIALCL_CLI_H_
