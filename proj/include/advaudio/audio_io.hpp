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

#include <string>
#include <vector>

#include "advaudio/errors.hpp"

namespace advaudio {

/// Mono waveform, full-scale normalized to [-1, 1].
struct AudioBuffer {
    std::vector<double> samples;
    int sample_rate = 16000;

    std::size_t size() const { return samples.size(); }
    double duration_s() const {
        return static_cast<double>(samples.size()) / sample_rate;
    }
};

/// Reads a RIFF/WAVE file (PCM, 16-bit signed LE). Multi-channel input is
/// downmixed by arithmetic mean. Integer samples map to [-1, 1] via /32768.
/// Unknown chunks (LIST, fact, ...) are skipped.
AudioBuffer read_wav(const std::string& path);

/// Writes a canonical 44-byte-header mono 16-bit PCM WAV. Quantization is
/// round-to-nearest with clamping at full scale.
void write_wav(const AudioBuffer& buffer, const std::string& path);

/// Encodes the buffer as WAV bytes (same format as write_wav).
std::vector<unsigned char> encode_wav(const AudioBuffer& buffer);

/// Decodes WAV bytes (same tolerance as read_wav).
AudioBuffer decode_wav(const unsigned char* bytes, std::size_t size);

/// Returns the buffer unchanged when rates match; there is deliberately no
/// resampler, so any other rate is a hard SampleRateMismatch.
AudioBuffer resample_check(const AudioBuffer& buffer, int required_rate);

}  // namespace advaudio
