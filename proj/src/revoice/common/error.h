// Copyright 2026  The revoice authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef REVOICE_COMMON_ERROR_H_
#define REVOICE_COMMON_ERROR_H_

#include <stdexcept>
#include <string>

namespace revoice {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define REVOICE_DEFINE_ERROR(NAME)     \
  class NAME : public ::revoice::Error { \
   public:                             \
    using Error::Error;                \
  };

// audio / signal
REVOICE_DEFINE_ERROR(EmptyAudio)
REVOICE_DEFINE_ERROR(NonFiniteAudio)
REVOICE_DEFINE_ERROR(SampleRateMismatch)
REVOICE_DEFINE_ERROR(LengthMismatch)
REVOICE_DEFINE_ERROR(ZeroSignal)
REVOICE_DEFINE_ERROR(ZeroNoise)
REVOICE_DEFINE_ERROR(WavFormatError)
REVOICE_DEFINE_ERROR(IoError)

// degradation
REVOICE_DEFINE_ERROR(SnrOutOfRange)
REVOICE_DEFINE_ERROR(ParamOutOfRange)

// nn / models
REVOICE_DEFINE_ERROR(ShapeMismatch)
REVOICE_DEFINE_ERROR(NonFiniteLoss)
REVOICE_DEFINE_ERROR(NonFiniteState)
REVOICE_DEFINE_ERROR(VersionMismatch)
REVOICE_DEFINE_ERROR(CorruptCheckpoint)

// conditioning
REVOICE_DEFINE_ERROR(TooFewFrames)
REVOICE_DEFINE_ERROR(FeatureKindMismatch)
REVOICE_DEFINE_ERROR(UnitOutOfRange)
REVOICE_DEFINE_ERROR(ClipTooShort)
REVOICE_DEFINE_ERROR(EmptyEnrollment)

// diffusion
REVOICE_DEFINE_ERROR(TimeOutOfRange)

// pipeline / eval / cli
REVOICE_DEFINE_ERROR(MissingComponent)
REVOICE_DEFINE_ERROR(EmptyManifest)
REVOICE_DEFINE_ERROR(ZeroReference)
REVOICE_DEFINE_ERROR(ConfigError)

#undef REVOICE_DEFINE_ERROR

}  // namespace revoice

#endif  // REVOICE_COMMON_ERROR_H_
