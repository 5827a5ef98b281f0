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

#include "advaudio/mfcc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "advaudio/fft.hpp"

namespace advaudio {

namespace {

double hz_to_mel(double f) { return 2595.0 * std::log10(1.0 + f / 700.0); }
double mel_to_hz(double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); }

}  // namespace

std::size_t MfccConfig::frame_len_samples(int sample_rate) const {
    return static_cast<std::size_t>(std::lround(frame_len_ms * sample_rate / 1000.0));
}

std::size_t MfccConfig::hop_samples(int sample_rate) const {
    std::size_t fl = frame_len_samples(sample_rate);
    std::size_t overlap =
        static_cast<std::size_t>(std::lround(fl * (1.0 - hop_fraction)));
    return fl > overlap ? fl - overlap : 1;
}

double MfccConfig::mel_fmax_effective(int sample_rate) const {
    return mel_fmax > 0.0 ? mel_fmax : sample_rate / 2.0;
}

void MfccConfig::validate(int sample_rate) const {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw InvalidConfig("alpha must satisfy 0 < alpha < 1");
    if (!(frame_len_ms >= 20.0 && frame_len_ms <= 40.0))
        throw InvalidConfig("frame_len_ms must be in [20, 40]");
    if (!(hop_fraction > 0.0 && hop_fraction <= 1.0))
        throw InvalidConfig("hop_fraction must be in (0, 1]");
    if (!is_power_of_two(n_fft))
        throw InvalidConfig("n_fft must be a power of two");
    if (n_fft < frame_len_samples(sample_rate))
        throw InvalidConfig("n_fft must be >= frame length in samples");
    if (n_mels < 13 || n_mels > 26)
        throw InvalidConfig("n_mels must be in [13, 26]");
    if (n_ceps < 1 || n_ceps > n_mels)
        throw InvalidConfig("n_ceps must be in [1, n_mels]");
    double fmax = mel_fmax_effective(sample_rate);
    if (!(mel_fmin >= 0.0 && mel_fmin < fmax))
        throw InvalidConfig("mel_fmin must be in [0, mel_fmax)");
    if (fmax > sample_rate / 2.0)
        throw InvalidConfig("mel_fmax must be <= sample_rate / 2");
}

FramePlan plan_frames(std::size_t signal_len, const MfccConfig& config,
                      int sample_rate) {
    FramePlan plan;
    plan.frame_len = config.frame_len_samples(sample_rate);
    plan.hop = config.hop_samples(sample_rate);
    plan.signal_len = signal_len;
    if (signal_len < plan.frame_len) {
        throw AudioTooShort("signal shorter than one frame (" +
                            std::to_string(signal_len) + " < " +
                            std::to_string(plan.frame_len) + " samples)");
    }
    std::size_t n_full = (signal_len - plan.frame_len) / plan.hop + 1;
    std::size_t covered = (n_full - 1) * plan.hop + plan.frame_len;
    std::size_t remainder = signal_len - covered;
    // tail frame only when the uncovered remainder is at least half a frame
    plan.has_tail = 2 * remainder >= plan.frame_len;
    plan.n_frames = n_full + (plan.has_tail ? 1 : 0);
    return plan;
}

AudioBuffer pre_emphasize(const AudioBuffer& buffer, double alpha) {
    if (buffer.samples.empty()) throw EmptyAudio("pre_emphasize on empty buffer");
    AudioBuffer out;
    out.sample_rate = buffer.sample_rate;
    out.samples.resize(buffer.samples.size());
    out.samples[0] = buffer.samples[0];
    for (std::size_t s = 1; s < buffer.samples.size(); ++s) {
        out.samples[s] = buffer.samples[s] - alpha * buffer.samples[s - 1];
    }
    return out;
}

Matrix frame_signal(const AudioBuffer& buffer, const MfccConfig& config) {
    FramePlan plan = plan_frames(buffer.samples.size(), config, buffer.sample_rate);
    Matrix frames(plan.n_frames, plan.frame_len, 0.0);
    for (std::size_t n = 0; n < plan.n_frames; ++n) {
        std::size_t start = plan.frame_start(n);
        std::size_t real_len = plan.frame_real_len(n);
        for (std::size_t m = 0; m < real_len; ++m) {
            frames(n, m) = buffer.samples[start + m];
        }
    }
    return frames;
}

std::vector<double> hamming_window(std::size_t frame_len) {
    std::vector<double> w(frame_len, 1.0);
    if (frame_len == 1) return w;
    for (std::size_t i = 0; i < frame_len; ++i) {
        w[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * i /
                                      static_cast<double>(frame_len - 1));
    }
    return w;
}

Matrix apply_window(const Matrix& frames) {
    std::vector<double> w = hamming_window(frames.cols);
    Matrix out = frames;
    for (std::size_t n = 0; n < out.rows; ++n) {
        for (std::size_t m = 0; m < out.cols; ++m) out(n, m) *= w[m];
    }
    return out;
}

Matrix power_spectrum(const Matrix& frames, std::size_t n_fft) {
    if (!is_power_of_two(n_fft))
        throw InvalidFftLength("n_fft must be a power of two");
    if (n_fft < frames.cols)
        throw InvalidFftLength("n_fft smaller than frame length");
    std::size_t n_bins = n_fft / 2 + 1;
    Matrix power(frames.rows, n_bins, 0.0);
    for (std::size_t n = 0; n < frames.rows; ++n) {
        auto spec = fft_real(&frames.data[n * frames.cols], frames.cols, n_fft);
        for (std::size_t k = 0; k < n_bins; ++k) {
            power(n, k) = std::norm(spec[k]) / static_cast<double>(n_fft);
        }
    }
    return power;
}

Matrix build_mel_filter_bank(const MfccConfig& config, int sample_rate) {
    const std::size_t n_bins = config.n_bins();
    const std::size_t max_bin = n_bins - 1;
    const double mel_lo = hz_to_mel(config.mel_fmin);
    const double mel_hi = hz_to_mel(config.mel_fmax_effective(sample_rate));

    std::vector<long> bins(config.n_mels + 2);
    for (std::size_t i = 0; i < bins.size(); ++i) {
        double mel = mel_lo + (mel_hi - mel_lo) * i / (config.n_mels + 1.0);
        double hz = mel_to_hz(mel);
        long b = static_cast<long>(
            std::floor((config.n_fft + 1) * hz / sample_rate));
        bins[i] = std::clamp(b, 0L, static_cast<long>(max_bin));
    }

    Matrix bank(config.n_mels, n_bins, 0.0);
    for (std::size_t l = 0; l < config.n_mels; ++l) {
        long b0 = bins[l], b1 = bins[l + 1], b2 = bins[l + 2];
        // keep edges strictly increasing so every filter has a nonempty support
        if (b1 <= b0) b1 = b0 + 1;
        if (b2 <= b1) b2 = b1 + 1;
        for (long j = b0; j < b1 && j <= static_cast<long>(max_bin); ++j) {
            bank(l, static_cast<std::size_t>(j)) =
                static_cast<double>(j - b0) / static_cast<double>(b1 - b0);
        }
        for (long j = b1; j < b2 && j <= static_cast<long>(max_bin); ++j) {
            bank(l, static_cast<std::size_t>(j)) =
                static_cast<double>(b2 - j) / static_cast<double>(b2 - b1);
        }
    }
    return bank;
}

Matrix mel_filter_bank(const Matrix& power, const MfccConfig& config,
                       int sample_rate) {
    if (power.cols != config.n_bins()) {
        throw DimensionMismatch("power spectrogram has " +
                                std::to_string(power.cols) + " bins, expected " +
                                std::to_string(config.n_bins()));
    }
    Matrix bank = build_mel_filter_bank(config, sample_rate);
    Matrix mel(power.rows, config.n_mels, 0.0);
    for (std::size_t n = 0; n < power.rows; ++n) {
        for (std::size_t l = 0; l < config.n_mels; ++l) {
            double acc = 0.0;
            for (std::size_t k = 0; k < power.cols; ++k) {
                acc += power(n, k) * bank(l, k);
            }
            mel(n, l) = acc;
        }
    }
    return mel;
}

Matrix dct_cepstrum(const Matrix& mel, std::size_t n_ceps) {
    if (n_ceps > mel.cols)
        throw DimensionMismatch("n_ceps exceeds mel band count");
    const std::size_t big_l = mel.cols;
    Matrix ceps(mel.rows, n_ceps, 0.0);
    for (std::size_t n = 0; n < mel.rows; ++n) {
        for (std::size_t i = 0; i < n_ceps; ++i) {
            double acc = 0.0;
            for (std::size_t l = 0; l < big_l; ++l) {
                acc += std::log(mel(n, l) + kLogFloor) *
                       std::cos(std::numbers::pi * i * (l + 0.5) / big_l);
            }
            ceps(n, i) = acc;
        }
    }
    return ceps;
}

MfccStages mfcc_stages(const AudioBuffer& buffer, const MfccConfig& config) {
    config.validate(buffer.sample_rate);
    MfccStages st;
    st.emphasized = pre_emphasize(buffer, config.alpha);
    st.plan = plan_frames(buffer.samples.size(), config, buffer.sample_rate);
    st.frames = frame_signal(st.emphasized, config);
    st.windowed = apply_window(st.frames);
    st.power = power_spectrum(st.windowed, config.n_fft);
    st.mel = mel_filter_bank(st.power, config, buffer.sample_rate);
    st.cepstra = dct_cepstrum(st.mel, config.n_ceps);
    return st;
}

Matrix mfcc(const AudioBuffer& buffer, const MfccConfig& config) {
    return mfcc_stages(buffer, config).cepstra;
}

}  // namespace advaudio
