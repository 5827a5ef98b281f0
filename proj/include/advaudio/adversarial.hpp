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

#include <complex>
#include <optional>
#include <vector>

#include "advaudio/audio_io.hpp"
#include "advaudio/masking.hpp"
#include "advaudio/matrix.hpp"
#include "advaudio/mfcc.hpp"

namespace advaudio {

/// Environmental noise mixed into the working signal before the attack.
/// The noise itself contributes to the perturbation, lowering the iteration
/// load. Levels above kEnvToleranceDb are rejected.
struct EnvNoiseProfile {
    double level_db = 0.0;
    std::optional<AudioBuffer> waveform;
};

inline constexpr double kEnvToleranceDb = 81.0;

enum class AttackMode {
    /// Gradient ascent on the distance from the clean cepstra (default).
    kAwayFromClean,
    /// Gradient descent toward the fixed zero target.
    kTowardTarget,
};

struct AttackConfig {
    int iterations = 10;
    double step_size = 0.001;   // per-iteration noise step, fraction of full scale
    double t_adv_scale = 0.05;  // per-sample noise cap, fraction of full scale
    AttackMode mode = AttackMode::kAwayFromClean;
    bool use_masking = true;
    std::optional<EnvNoiseProfile> env_profile;

    void validate() const;
};

struct IterationRecord {
    int iteration = 0;
    double cost = 0.0;
    double wall_ms = 0.0;
};

/// Final perturbation: per-frame one-sided spectra of the noise plus its
/// time-domain waveform (same length as the input).
struct NoiseSpectrum {
    std::vector<std::vector<std::complex<double>>> frame_spectra;
    std::vector<double> waveform;
    std::vector<IterationRecord> trace;  // one record per iteration
    int best_iteration = 0;
    double initial_cost = 0.0;
    double final_cost = 0.0;
};

/// J = mean over all entries of (features - target)^2.
double cost(const Matrix& features, const Matrix& target);

/// dJ/dx computed by reverse traversal of the six pipeline stages.
std::vector<double> gradient_wrt_waveform(const AudioBuffer& buffer,
                                          const MfccConfig& config,
                                          const Matrix& target);

/// level_db = 20 log10(rms) + 94, floored at 0.
double estimate_env_level(const AudioBuffer& env);

/// Iterative gradient attack. Each iteration takes a max-normalized gradient
/// step, optionally projects the noise through the gain map in the frequency
/// domain, and clamps every sample to +-t_adv_scale. Falls back to the best
/// iterate (including the zero noise) by cost.
NoiseSpectrum generate_noise(const AudioBuffer& buffer, const MfccConfig& mfcc_cfg,
                             const AttackConfig& attack_cfg,
                             const std::optional<GainMap>& mask = std::nullopt);

/// x' = clamp(x + delta, -1, 1).
AudioBuffer apply_noise(const AudioBuffer& buffer, const NoiseSpectrum& noise);

/// Reshapes a time-domain noise signal through per-bin gains: frame, FFT,
/// multiply, inverse FFT, overlap-add with coverage normalization. Exposed for
/// tests and for the masking-energy measurements in the eval harness.
std::vector<double> project_noise_through_mask(const std::vector<double>& delta,
                                               const MfccConfig& config,
                                               int sample_rate,
                                               const GainMap& mask);

}  // namespace advaudio
