// Copyright (c) 2026, The grayanchor Authors. All rights reserved.
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

#pragma once

#include <stdexcept>
#include <string>

namespace grayanchor {

/// Broad failure class. The command-line front end maps each class to an
/// exit code (usage = 1, data = 2, numeric = 3).
enum class ErrorClass { kUsage, kData, kNumeric };

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, const std::string& what)
      : std::runtime_error(what), cls_(cls) {}
  ErrorClass error_class() const noexcept { return cls_; }

 private:
  ErrorClass cls_;
};

#define GRAYANCHOR_DEFINE_ERROR(Name, Class, prefix)                  \
  class Name : public Error {                                         \
   public:                                                            \
    explicit Name(const std::string& what)                            \
        : Error(ErrorClass::Class, std::string(prefix) + ": " + what) {} \
  };

// imageio
GRAYANCHOR_DEFINE_ERROR(DecodeError, kData, "decode error")
GRAYANCHOR_DEFINE_ERROR(DimensionError, kData, "dimension error")
GRAYANCHOR_DEFINE_ERROR(InputError, kData, "input error")
GRAYANCHOR_DEFINE_ERROR(ManifestError, kData, "manifest error")
GRAYANCHOR_DEFINE_ERROR(IoError, kData, "i/o error")
// detectors and estimators
GRAYANCHOR_DEFINE_ERROR(DetectorError, kData, "detector error")
GRAYANCHOR_DEFINE_ERROR(SelectionError, kData, "selection error")
GRAYANCHOR_DEFINE_ERROR(EstimationError, kNumeric, "estimation error")
// gpnet
GRAYANCHOR_DEFINE_ERROR(StructuralError, kData, "structural error")
GRAYANCHOR_DEFINE_ERROR(LossError, kNumeric, "loss error")
GRAYANCHOR_DEFINE_ERROR(UsageError, kUsage, "usage error")
GRAYANCHOR_DEFINE_ERROR(TrainingError, kNumeric, "training error")
GRAYANCHOR_DEFINE_ERROR(CheckpointError, kData, "checkpoint error")
// evalbench
GRAYANCHOR_DEFINE_ERROR(StatsError, kNumeric, "stats error")
GRAYANCHOR_DEFINE_ERROR(SplitError, kUsage, "split error")
GRAYANCHOR_DEFINE_ERROR(ConfigError, kUsage, "config error")
GRAYANCHOR_DEFINE_ERROR(MetricError, kNumeric, "metric error")
// synthlab
GRAYANCHOR_DEFINE_ERROR(GenerationError, kData, "generation error")

#undef GRAYANCHOR_DEFINE_ERROR

}  // namespace grayanchor
