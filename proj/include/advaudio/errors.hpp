// Copyright 2026 The advaudio Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace advaudio {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// audio_io
struct MalformedWav : Error { using Error::Error; };
struct UnsupportedEncoding : Error { using Error::Error; };
struct EmptyAudio : Error { using Error::Error; };
struct IoFailure : Error { using Error::Error; };

struct SampleRateMismatch : Error {
    SampleRateMismatch(int actual, int required)
        : Error("sample rate mismatch: got " + std::to_string(actual) +
                " Hz, required " + std::to_string(required) + " Hz"),
          actual_hz(actual), required_hz(required) {}
    int actual_hz;
    int required_hz;
};

// mfcc_pipeline
struct AudioTooShort : Error { using Error::Error; };
struct InvalidFftLength : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct InvalidConfig : Error { using Error::Error; };

// adversarial_engine
struct EnvNoiseTooLoud : Error { using Error::Error; };

// eval_harness
struct SilentInput : Error { using Error::Error; };
struct EmptyReference : Error { using Error::Error; };
struct ProviderUnavailable : Error { using Error::Error; };
struct UnmappedClip : Error { using Error::Error; };

}  // namespace advaudio
