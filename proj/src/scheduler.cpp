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

#include "advaudio/scheduler.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace advaudio {

PlanResult plan_iterations(const LatencyProfile& profile, double per_iter_ms,
                           double fixed_ms) {
    PlanResult res;
    double headroom = profile.budget_ms - fixed_ms;
    if (headroom < per_iter_ms) {
        res.iterations = 1;
        res.budget_exceeded = true;
        return res;
    }
    res.iterations = std::max(1, static_cast<int>(std::floor(headroom / per_iter_ms)));
    return res;
}

std::vector<AudioBuffer> chunk_buffer(const AudioBuffer& buffer, double chunk_ms) {
    std::size_t chunk_len = static_cast<std::size_t>(
        std::lround(chunk_ms * buffer.sample_rate / 1000.0));
    if (chunk_len == 0) throw InvalidConfig("chunk_ms too small");
    std::vector<AudioBuffer> chunks;
    for (std::size_t pos = 0; pos < buffer.samples.size(); pos += chunk_len) {
        std::size_t end = std::min(buffer.samples.size(), pos + chunk_len);
        AudioBuffer c;
        c.sample_rate = buffer.sample_rate;
        c.samples.assign(buffer.samples.begin() + pos, buffer.samples.begin() + end);
        chunks.push_back(std::move(c));
    }
    return chunks;
}

AudioBuffer concat_chunks(const std::vector<AudioBuffer>& chunks) {
    AudioBuffer out;
    if (chunks.empty()) return out;
    out.sample_rate = chunks.front().sample_rate;
    for (const auto& c : chunks) {
        out.samples.insert(out.samples.end(), c.samples.begin(), c.samples.end());
    }
    return out;
}

StreamResult process_stream(const std::vector<AudioBuffer>& source,
                            const LatencyProfile& profile,
                            const MfccConfig& mfcc_cfg,
                            const AttackConfig& attack_cfg, bool use_mask,
                            const StreamOptions& options) {
    StreamResult result;
    if (source.empty()) return result;

    double per_iter_est = options.init_per_iter_ms;
    double finish_prev = 0.0;  // stream-clock time the previous chunk finished

    for (std::size_t i = 0; i < source.size(); ++i) {
        const AudioBuffer& chunk = source[i];
        const double arrival = static_cast<double>(i) * profile.chunk_ms;
        const double wait = std::max(0.0, finish_prev - arrival);
        const double fixed_charge = i == 0 ? options.init_fixed_ms : 0.0;

        // plan against the budget left after queueing delay, capped at a
        // sustainable per-chunk-period rate so the backlog can drain
        LatencyProfile effective = profile;
        effective.budget_ms = std::max(0.0, profile.budget_ms - wait);
        PlanResult plan = plan_iterations(effective, per_iter_est, fixed_charge);
        int sustain = std::max(
            1, static_cast<int>(std::floor(profile.chunk_ms / per_iter_est)));
        int granted = std::max(1, std::min(plan.iterations, sustain));
        if (options.max_iterations > 0) {
            granted = std::min(granted, options.max_iterations);
        }

        AttackConfig chunk_cfg = attack_cfg;
        chunk_cfg.iterations = granted;
        chunk_cfg.use_masking = use_mask;

        double actual_ms = 0.0;
        AudioBuffer out_chunk;
        try {
            std::size_t frame_len = mfcc_cfg.frame_len_samples(chunk.sample_rate);
            if (chunk.samples.size() < frame_len) {
                out_chunk = chunk;  // too short to analyze; pass through
                if (options.simulated_cost) {
                    actual_ms = options.simulated_cost(static_cast<int>(i), 0);
                }
            } else if (options.simulated_cost) {
                NoiseSpectrum noise = generate_noise(chunk, mfcc_cfg, chunk_cfg);
                out_chunk = apply_noise(chunk, noise);
                actual_ms = options.simulated_cost(static_cast<int>(i), granted);
            } else {
                auto t0 = std::chrono::steady_clock::now();
                NoiseSpectrum noise = generate_noise(chunk, mfcc_cfg, chunk_cfg);
                out_chunk = apply_noise(chunk, noise);
                auto t1 = std::chrono::steady_clock::now();
                actual_ms =
                    std::chrono::duration<double, std::milli>(t1 - t0).count();
            }
        } catch (const Error& e) {
            throw StreamAborted("chunk " + std::to_string(i) + ": " + e.what(),
                                std::move(result));
        }

        const double start = std::max(arrival, finish_prev);
        finish_prev = start + actual_ms;

        ScheduleDecision dec;
        dec.chunk_index = static_cast<int>(i);
        dec.iterations_granted = granted;
        dec.deadline_ms = arrival + profile.budget_ms;
        dec.actual_ms = actual_ms;
        dec.wait_ms = wait;
        dec.flagged = wait + actual_ms > profile.budget_ms;
        result.log.push_back(dec);
        result.chunks.push_back(std::move(out_chunk));

        // EMA update of the per-iteration cost estimate
        double marginal = actual_ms - fixed_charge;
        double measured = marginal > 0.0 ? marginal / granted
                                         : actual_ms / granted;
        if (measured > 0.0) {
            per_iter_est = options.ema_alpha * measured +
                           (1.0 - options.ema_alpha) * per_iter_est;
        }
    }
    return result;
}

}  // namespace advaudio
