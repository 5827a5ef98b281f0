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

#include <functional>
#include <string>
#include <vector>

#include "advaudio/adversarial.hpp"
#include "advaudio/audio_io.hpp"
#include "advaudio/mfcc.hpp"

namespace advaudio {

/// Application latency budget for a chunked stream.
struct LatencyProfile {
    std::string name;
    double budget_ms = 0.0;  // max added delay per chunk
    double chunk_ms = 200.0;

    static LatencyProfile telephone() { return {"telephone", 450.0, 200.0}; }
    static LatencyProfile messaging() { return {"messaging", 1000.0, 200.0}; }
};

struct PlanResult {
    int iterations = 1;
    bool budget_exceeded = false;
};

/// Largest k >= 1 with fixed_ms + k * per_iter_ms <= budget_ms. When even
/// k = 1 misses the budget, returns 1 with budget_exceeded set.
PlanResult plan_iterations(const LatencyProfile& profile, double per_iter_ms,
                           double fixed_ms);

struct ScheduleDecision {
    int chunk_index = 0;
    int iterations_granted = 1;
    double deadline_ms = 0.0;  // arrival + budget on the stream clock
    double actual_ms = 0.0;
    double wait_ms = 0.0;      // queueing delay before processing started
    bool flagged = false;      // wait + processing exceeded the budget
};

struct StreamOptions {
    double init_per_iter_ms = 42.0;
    double init_fixed_ms = 302.0;  // first-chunk warm-up overhead estimate
    double ema_alpha = 0.3;
    int max_iterations = 0;  // 0 = no cap beyond the latency plan
    /// When set, processing cost is taken from this model instead of the wall
    /// clock and the stream runs under a simulated clock. Arguments are
    /// (chunk_index, iterations_granted); returns milliseconds.
    std::function<double(int, int)> simulated_cost;
};

struct StreamResult {
    std::vector<AudioBuffer> chunks;
    std::vector<ScheduleDecision> log;
};

/// Thrown when a chunk fails mid-stream; carries the partial result.
struct StreamAborted : Error {
    StreamAborted(const std::string& what, StreamResult partial_result)
        : Error(what), partial(std::move(partial_result)) {}
    StreamResult partial;
};

/// Perturbs each chunk independently with a latency-planned iteration count.
/// Chunks arrive at chunk_ms cadence on the stream clock; the per-iteration
/// cost estimate is updated as an exponential moving average, and iteration
/// grants shrink both with queue backlog and to stay sustainable within one
/// chunk period. Chunks shorter than one analysis frame pass through unchanged.
StreamResult process_stream(const std::vector<AudioBuffer>& source,
                            const LatencyProfile& profile,
                            const MfccConfig& mfcc_cfg,
                            const AttackConfig& attack_cfg, bool use_mask,
                            const StreamOptions& options = {});

/// Slices a buffer into chunk_ms pieces (last chunk may be shorter).
std::vector<AudioBuffer> chunk_buffer(const AudioBuffer& buffer, double chunk_ms);

/// Concatenates chunks back into one buffer.
AudioBuffer concat_chunks(const std::vector<AudioBuffer>& chunks);

}  // namespace advaudio
