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

#include "advaudio/adversarial.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

#include "advaudio/fft.hpp"

namespace advaudio {

void AttackConfig::validate() const {
    if (iterations < 1) throw InvalidConfig("iterations must be >= 1");
    if (!(step_size > 0.0)) throw InvalidConfig("step_size must be > 0");
    if (!(t_adv_scale > 0.0 && t_adv_scale < 1.0))
        throw InvalidConfig("t_adv_scale must be in (0, 1)");
}

double cost(const Matrix& features, const Matrix& target) {
    if (!features.same_shape(target))
        throw DimensionMismatch("feature/target shapes differ");
    double acc = 0.0;
    for (std::size_t i = 0; i < features.data.size(); ++i) {
        double d = features.data[i] - target.data[i];
        acc += d * d;
    }
    return acc / static_cast<double>(features.data.size());
}

std::vector<double> gradient_wrt_waveform(const AudioBuffer& buffer,
                                          const MfccConfig& config,
                                          const Matrix& target) {
    MfccStages st = mfcc_stages(buffer, config);
    if (!st.cepstra.same_shape(target))
        throw DimensionMismatch("target shape does not match cepstra");

    const std::size_t len = buffer.samples.size();
    const std::size_t n_fft = config.n_fft;
    const std::size_t n_bins = config.n_bins();
    const std::size_t n_mels = config.n_mels;
    const std::size_t n_ceps = config.n_ceps;
    const std::size_t frame_len = st.plan.frame_len;

    Matrix bank = build_mel_filter_bank(config, buffer.sample_rate);
    std::vector<double> window = hamming_window(frame_len);

    // cos(pi * i * (l + 0.5) / L), i-major
    std::vector<double> dct_table(n_ceps * n_mels);
    for (std::size_t i = 0; i < n_ceps; ++i) {
        for (std::size_t l = 0; l < n_mels; ++l) {
            dct_table[i * n_mels + l] =
                std::cos(std::numbers::pi * i * (l + 0.5) / n_mels);
        }
    }

    // dJ/dC for the mean-of-squares cost
    const double inv_count = 1.0 / static_cast<double>(st.cepstra.data.size());

    std::vector<double> grad_emph(len, 0.0);
    std::vector<double> g_logmel(n_mels), g_power(n_bins);
    std::vector<std::complex<double>> h(n_fft);

    for (std::size_t n = 0; n < st.plan.n_frames; ++n) {
        // DCT adjoint: cotangent of log-mel is the cosine transpose
        for (std::size_t l = 0; l < n_mels; ++l) {
            double acc = 0.0;
            for (std::size_t i = 0; i < n_ceps; ++i) {
                double gc = 2.0 * (st.cepstra(n, i) - target(n, i)) * inv_count;
                acc += gc * dct_table[i * n_mels + l];
            }
            // log adjoint
            g_logmel[l] = acc / (st.mel(n, l) + kLogFloor);
        }

        // mel filter bank adjoint (transpose)
        for (std::size_t k = 0; k < n_bins; ++k) {
            double acc = 0.0;
            for (std::size_t l = 0; l < n_mels; ++l) {
                acc += g_logmel[l] * bank(l, k);
            }
            g_power[k] = acc;
        }

        // power-spectrum adjoint: dJ/dx_m = (2/N) Re(sum_k g_k conj(F_k) e^{-i2pikm/N})
        auto spec = fft_real(&st.windowed.data[n * frame_len], frame_len, n_fft);
        std::fill(h.begin(), h.end(), std::complex<double>(0.0, 0.0));
        for (std::size_t k = 0; k < n_bins; ++k) {
            h[k] = g_power[k] * std::conj(spec[k]);
        }
        fft_inplace(h, false);

        const double scale = 2.0 / static_cast<double>(n_fft);
        std::size_t start = st.plan.frame_start(n);
        std::size_t real_len = st.plan.frame_real_len(n);
        for (std::size_t m = 0; m < real_len; ++m) {
            // window adjoint folded into the overlap-add scatter
            grad_emph[start + m] += scale * h[m].real() * window[m];
        }
    }

    // pre-emphasis adjoint: x_s feeds y_s with +1 and y_{s+1} with -alpha
    std::vector<double> grad(len, 0.0);
    for (std::size_t s = 0; s < len; ++s) {
        grad[s] = grad_emph[s];
        if (s + 1 < len) grad[s] -= config.alpha * grad_emph[s + 1];
    }
    return grad;
}

double estimate_env_level(const AudioBuffer& env) {
    if (env.samples.empty()) throw EmptyAudio("empty environment buffer");
    double acc = 0.0;
    for (double s : env.samples) acc += s * s;
    double rms = std::sqrt(acc / env.samples.size());
    if (rms <= 0.0) return 0.0;
    return std::max(0.0, 20.0 * std::log10(rms) + 94.0);
}

std::vector<double> project_noise_through_mask(const std::vector<double>& delta,
                                               const MfccConfig& config,
                                               int sample_rate,
                                               const GainMap& mask) {
    FramePlan plan = plan_frames(delta.size(), config, sample_rate);
    const std::size_t n_fft = config.n_fft;
    const std::size_t n_bins = config.n_bins();
    if (mask.gains.rows != plan.n_frames || mask.gains.cols != n_bins) {
        throw DimensionMismatch("gain map shape does not match framing");
    }

    std::vector<double> acc(delta.size(), 0.0);
    std::vector<int> cover(delta.size(), 0);
    for (std::size_t n = 0; n < plan.n_frames; ++n) {
        std::size_t start = plan.frame_start(n);
        std::size_t real_len = plan.frame_real_len(n);
        auto spec = fft_real(delta.data() + start, real_len, n_fft);
        for (std::size_t k = 0; k < n_bins; ++k) {
            double g = mask.gains(n, k);
            spec[k] *= g;
            if (k > 0 && k < n_fft / 2) spec[n_fft - k] *= g;  // conjugate bin
        }
        fft_inplace(spec, true);
        for (std::size_t m = 0; m < real_len; ++m) {
            acc[start + m] += spec[m].real();
            cover[start + m] += 1;
        }
    }

    std::vector<double> out(delta.size());
    for (std::size_t s = 0; s < delta.size(); ++s) {
        out[s] = cover[s] > 0 ? acc[s] / cover[s] : delta[s];
    }
    return out;
}

NoiseSpectrum generate_noise(const AudioBuffer& buffer, const MfccConfig& mfcc_cfg,
                             const AttackConfig& attack_cfg,
                             const std::optional<GainMap>& mask) {
    attack_cfg.validate();
    mfcc_cfg.validate(buffer.sample_rate);

    // Environmental noise contributes to the perturbation: gradients are taken
    // at x + delta_env.
    AudioBuffer working = buffer;
    if (attack_cfg.env_profile) {
        const EnvNoiseProfile& env = *attack_cfg.env_profile;
        double level = env.waveform ? estimate_env_level(*env.waveform)
                                    : env.level_db;
        if (level > kEnvToleranceDb) {
            throw EnvNoiseTooLoud("environmental noise level " +
                                  std::to_string(level) + " dB exceeds " +
                                  std::to_string(kEnvToleranceDb) + " dB");
        }
        if (env.waveform) {
            const auto& ew = env.waveform->samples;
            for (std::size_t s = 0; s < working.samples.size(); ++s) {
                double v = working.samples[s] + ew[s % ew.size()];
                working.samples[s] = std::clamp(v, -1.0, 1.0);
            }
        }
    }

    MfccStages work_stages = mfcc_stages(working, mfcc_cfg);

    // Both modes measure J against the fixed zero target; they differ only in
    // direction. Ascent drives the cepstra away from zero (and with them away
    // from the clean features); descent drives them toward it.
    Matrix target(work_stages.cepstra.rows, work_stages.cepstra.cols, 0.0);
    const bool maximize = attack_cfg.mode == AttackMode::kAwayFromClean;
    const double direction = maximize ? 1.0 : -1.0;

    std::optional<GainMap> effective_mask = mask;
    if (!effective_mask && attack_cfg.use_masking) {
        MaskParams params;
        GainMap sens = sensitivity_mask(work_stages.plan.n_frames,
                                        mfcc_cfg.n_bins(), buffer.sample_rate,
                                        params);
        GainMap loud = loudness_mask(work_stages.power, params);
        effective_mask = combine_masks(sens, loud);
    }

    const std::size_t len = buffer.samples.size();
    const double t_adv = attack_cfg.t_adv_scale;

    std::vector<double> delta(len, 0.0);
    NoiseSpectrum result;
    result.initial_cost = cost(work_stages.cepstra, target);

    double best_cost = result.initial_cost;
    std::vector<double> best_delta = delta;
    int best_iter = 0;

    AudioBuffer perturbed = working;
    for (int it = 1; it <= attack_cfg.iterations; ++it) {
        auto t0 = std::chrono::steady_clock::now();

        for (std::size_t s = 0; s < len; ++s) {
            perturbed.samples[s] = working.samples[s] + delta[s];
        }
        std::vector<double> grad =
            gradient_wrt_waveform(perturbed, mfcc_cfg, target);

        // The per-iteration step is projected through the mask first and
        // max-normalized afterwards: the attack keeps a full-size step but
        // only along mask-permitted spectral directions, so the accumulated
        // noise inherits the mask's shape without compounding attenuation.
        if (effective_mask) {
            grad = project_noise_through_mask(grad, mfcc_cfg,
                                              buffer.sample_rate,
                                              *effective_mask);
        }
        double max_abs = 0.0;
        for (double g : grad) max_abs = std::max(max_abs, std::abs(g));
        if (max_abs > 0.0) {
            const double scale = direction * attack_cfg.step_size / max_abs;
            for (std::size_t s = 0; s < len; ++s) delta[s] += scale * grad[s];
        }
        for (double& d : delta) d = std::clamp(d, -t_adv, t_adv);

        for (std::size_t s = 0; s < len; ++s) {
            perturbed.samples[s] = working.samples[s] + delta[s];
        }
        double j = cost(mfcc(perturbed, mfcc_cfg), target);

        auto t1 = std::chrono::steady_clock::now();
        double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        result.trace.push_back({it, j, ms});

        if (maximize ? j > best_cost : j < best_cost) {
            best_cost = j;
            best_delta = delta;
            best_iter = it;
        }
    }

    result.waveform = std::move(best_delta);
    result.best_iteration = best_iter;
    result.final_cost = best_cost;

    // one-sided spectra of the final noise, frame by frame
    FramePlan plan = plan_frames(len, mfcc_cfg, buffer.sample_rate);
    result.frame_spectra.resize(plan.n_frames);
    for (std::size_t n = 0; n < plan.n_frames; ++n) {
        auto spec = fft_real(result.waveform.data() + plan.frame_start(n),
                             plan.frame_real_len(n), mfcc_cfg.n_fft);
        spec.resize(mfcc_cfg.n_bins());
        result.frame_spectra[n] = std::move(spec);
    }
    return result;
}

AudioBuffer apply_noise(const AudioBuffer& buffer, const NoiseSpectrum& noise) {
    if (noise.waveform.size() != buffer.samples.size()) {
        throw DimensionMismatch("noise length does not match buffer length");
    }
    AudioBuffer out;
    out.sample_rate = buffer.sample_rate;
    out.samples.resize(buffer.samples.size());
    for (std::size_t s = 0; s < buffer.samples.size(); ++s) {
        out.samples[s] = std::clamp(buffer.samples[s] + noise.waveform[s], -1.0, 1.0);
    }
    return out;
}

}  // namespace advaudio
