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

#include <cstddef>
#include <vector>

#include "advaudio/audio_io.hpp"
#include "advaudio/matrix.hpp"

namespace advaudio {

/// Hyperparameters of the six-stage cepstral front end.
struct MfccConfig {
    double alpha = 0.97;        // pre-emphasis coefficient
    double frame_len_ms = 25.0; // valid 20..40
    double hop_fraction = 0.5;  // frame advance as fraction of frame
    std::size_t n_fft = 512;    // power of two, >= frame length in samples
    std::size_t n_mels = 26;    // valid 13..26
    std::size_t n_ceps = 13;    // <= n_mels
    double mel_fmin = 0.0;      // Hz
    double mel_fmax = 0.0;      // Hz; <= 0 means sample_rate / 2

    std::size_t frame_len_samples(int sample_rate) const;
    std::size_t hop_samples(int sample_rate) const;
    double mel_fmax_effective(int sample_rate) const;
    std::size_t n_bins() const { return n_fft / 2 + 1; }

    /// Throws InvalidConfig naming the offending key.
    void validate(int sample_rate) const;
};

/// Resolved framing layout: frame n covers samples [n*hop, n*hop + frame_len).
/// The last frame may be a zero-padded tail (see frame_signal).
struct FramePlan {
    std::size_t frame_len = 0;
    std::size_t hop = 0;
    std::size_t n_frames = 0;
    std::size_t signal_len = 0;
    bool has_tail = false;

    std::size_t frame_start(std::size_t n) const { return n * hop; }
    /// Number of real (non-padded) samples in frame n.
    std::size_t frame_real_len(std::size_t n) const {
        std::size_t start = frame_start(n);
        std::size_t avail = signal_len > start ? signal_len - start : 0;
        return avail < frame_len ? avail : frame_len;
    }
};

FramePlan plan_frames(std::size_t signal_len, const MfccConfig& config,
                      int sample_rate);

/// y_0 = x_0; y_s = x_s - alpha * x_{s-1}.
AudioBuffer pre_emphasize(const AudioBuffer& buffer, double alpha);

/// Slices the signal into overlapping frames per plan_frames. A zero-padded
/// tail frame is emitted when the uncovered remainder is at least half a frame.
Matrix frame_signal(const AudioBuffer& buffer, const MfccConfig& config);

/// Hamming window w(n') = 0.54 - 0.46 cos(2π n' / (N-1)), 0-based in-frame index.
std::vector<double> hamming_window(std::size_t frame_len);
Matrix apply_window(const Matrix& frames);

/// One-sided power spectrum: P(k,n) = |FFT(frame_n)(k)|^2 / n_fft, k = 0..n_fft/2.
Matrix power_spectrum(const Matrix& frames, std::size_t n_fft);

/// Triangular filters spaced uniformly on m(f) = 2595 log10(1 + f/700),
/// n_mels rows by n_fft/2+1 columns; each filter peaks at exactly 1.0 at its
/// center bin.
Matrix build_mel_filter_bank(const MfccConfig& config, int sample_rate);

Matrix mel_filter_bank(const Matrix& power, const MfccConfig& config,
                       int sample_rate);

/// DCT-II of the log mel energies with floor eps = 1e-10:
/// c(i,n) = sum_l log(mel(l,n) + eps) * cos(π i (l + 0.5) / L).
Matrix dct_cepstrum(const Matrix& mel, std::size_t n_ceps);

inline constexpr double kLogFloor = 1e-10;

/// All intermediates of one forward pass; the gradient engine traverses these
/// in reverse.
struct MfccStages {
    AudioBuffer emphasized;
    FramePlan plan;
    Matrix frames;
    Matrix windowed;
    Matrix power;
    Matrix mel;
    Matrix cepstra;
};

MfccStages mfcc_stages(const AudioBuffer& buffer, const MfccConfig& config);
Matrix mfcc(const AudioBuffer& buffer, const MfccConfig& config);

}  // namespace advaudio
