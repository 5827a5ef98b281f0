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

#include <doctest.h>

#include <algorithm>
#include <vector>

#include "advaudio/scheduler.hpp"
#include "test_util.hpp"

using namespace advaudio;

namespace {

MfccConfig default_mfcc() { return MfccConfig{}; }

AttackConfig light_attack() {
    AttackConfig a;
    a.iterations = 10;
    a.use_masking = false;
    return a;
}

std::vector<AudioBuffer> make_chunks(int n, double chunk_ms, int sr,
                                     std::uint64_t seed) {
    std::vector<AudioBuffer> chunks;
    for (int i = 0; i < n; ++i) {
        chunks.push_back(
            testutil::make_speech_clip(chunk_ms / 1000.0, sr, seed + i));
    }
    return chunks;
}

}  // namespace

TEST_CASE("plan_iterations") {
    SUBCASE("telephone profile with the measured costs plans 3") {
        PlanResult plan = plan_iterations(LatencyProfile::telephone(), 42.0, 302.0);
        CHECK(plan.iterations == 3);
        CHECK_FALSE(plan.budget_exceeded);
    }
    SUBCASE("messaging profile with the measured costs plans 16") {
        PlanResult plan = plan_iterations(LatencyProfile::messaging(), 42.0, 302.0);
        CHECK(plan.iterations == 16);
        CHECK_FALSE(plan.budget_exceeded);
    }
    SUBCASE("infeasible budgets still grant one iteration, flagged") {
        LatencyProfile tight{"tight", 100.0, 200.0};
        PlanResult plan = plan_iterations(tight, 42.0, 302.0);
        CHECK(plan.iterations == 1);
        CHECK(plan.budget_exceeded);
    }
    SUBCASE("exact boundary counts as within budget") {
        LatencyProfile exact{"exact", 302.0 + 3 * 42.0, 200.0};
        PlanResult plan = plan_iterations(exact, 42.0, 302.0);
        CHECK(plan.iterations == 3);
        CHECK_FALSE(plan.budget_exceeded);
    }
}

TEST_CASE("process_stream under a simulated clock") {
    const int sr = 16000;
    MfccConfig cfg = default_mfcc();
    AttackConfig attack = light_attack();

    SUBCASE("empty stream") {
        StreamResult out = process_stream({}, LatencyProfile::telephone(), cfg,
                                          attack, false);
        CHECK(out.chunks.empty());
        CHECK(out.log.empty());
    }
    SUBCASE("generous budget never flags and grants a constant count") {
        LatencyProfile roomy{"roomy", 5000.0, 200.0};
        StreamOptions opts;
        opts.max_iterations = 4;
        opts.simulated_cost = [&](int chunk, int iters) {
            return (chunk == 0 ? 302.0 : 0.0) + iters * 42.0;
        };
        auto chunks = make_chunks(10, 200.0, sr, 100);
        StreamResult out = process_stream(chunks, roomy, cfg, attack, false, opts);
        REQUIRE(out.log.size() == 10);
        REQUIRE(out.chunks.size() == 10);
        for (const auto& d : out.log) {
            CHECK_FALSE(d.flagged);
            CHECK(d.iterations_granted == 4);
        }
        // output cadence is preserved chunk for chunk
        for (std::size_t i = 0; i < chunks.size(); ++i) {
            CHECK(out.chunks[i].samples.size() == chunks[i].samples.size());
        }
    }
    SUBCASE("a transient slow chunk recovers within two chunks") {
        LatencyProfile profile = LatencyProfile::telephone();
        StreamOptions opts;
        opts.simulated_cost = [&](int chunk, int iters) {
            double fixed = chunk == 0 ? 302.0 : 0.0;
            double per = chunk == 4 ? 5 * 42.0 : 42.0;  // one 5x stall
            return fixed + iters * per;
        };
        auto chunks = make_chunks(16, 200.0, sr, 200);
        StreamResult out = process_stream(chunks, profile, cfg, attack, false, opts);
        REQUIRE(out.log.size() == 16);
        // the grant right after the stall must drop below the grant before it
        CHECK(out.log[5].iterations_granted < out.log[3].iterations_granted);
        // once the backlog drains and the cost-estimate EMA settles, grants
        // climb back to at least the pre-stall level minus one
        int tail_max = 0;
        for (std::size_t i = 10; i < out.log.size(); ++i) {
            tail_max = std::max(tail_max, out.log[i].iterations_granted);
        }
        CHECK(tail_max >= out.log[3].iterations_granted - 1);
    }
    SUBCASE("grants degrade monotonically as the budget shrinks") {
        auto chunks = make_chunks(6, 200.0, sr, 300);
        StreamOptions opts;
        opts.simulated_cost = [](int chunk, int iters) {
            return (chunk == 0 ? 302.0 : 0.0) + iters * 42.0;
        };
        int prev_total = 1 << 30;
        for (double budget : {2000.0, 800.0, 450.0, 100.0}) {
            LatencyProfile p{"sweep", budget, 200.0};
            StreamResult out = process_stream(chunks, p, cfg, attack, false, opts);
            int total = 0;
            for (const auto& d : out.log) total += d.iterations_granted;
            CHECK(total <= prev_total);
            prev_total = total;
        }
    }
    SUBCASE("liveness: an impossible budget still processes every chunk") {
        LatencyProfile impossible{"impossible", 1.0, 200.0};
        StreamOptions opts;
        opts.simulated_cost = [](int chunk, int iters) {
            return (chunk == 0 ? 302.0 : 0.0) + iters * 42.0;
        };
        auto chunks = make_chunks(5, 200.0, sr, 400);
        StreamResult out =
            process_stream(chunks, impossible, cfg, attack, false, opts);
        REQUIRE(out.log.size() == 5);
        for (const auto& d : out.log) {
            CHECK(d.iterations_granted >= 1);
            CHECK(d.flagged);
        }
    }
    SUBCASE("chunks are perturbed independently") {
        // processing chunk i inside the stream must equal processing it alone
        LatencyProfile roomy{"roomy", 5000.0, 200.0};
        StreamOptions opts;
        opts.max_iterations = 2;
        opts.simulated_cost = [](int, int iters) { return iters * 1.0; };
        auto chunks = make_chunks(3, 200.0, sr, 500);
        StreamResult out = process_stream(chunks, roomy, cfg, attack, false, opts);
        REQUIRE(out.chunks.size() == 3);
        for (std::size_t i = 0; i < chunks.size(); ++i) {
            AttackConfig solo = attack;
            solo.iterations = out.log[i].iterations_granted;
            NoiseSpectrum noise = generate_noise(chunks[i], cfg, solo);
            AudioBuffer expected = apply_noise(chunks[i], noise);
            CHECK(out.chunks[i].samples == expected.samples);
        }
    }
    SUBCASE("sub-frame chunks pass through unchanged") {
        LatencyProfile roomy{"roomy", 5000.0, 200.0};
        StreamOptions opts;
        opts.simulated_cost = [](int, int iters) { return iters * 1.0; };
        std::vector<AudioBuffer> chunks = {
            testutil::make_speech_clip(0.2, sr, 600),
            {std::vector<double>(100, 0.25), sr},  // shorter than one frame
        };
        StreamResult out = process_stream(chunks, roomy, cfg, attack, false, opts);
        REQUIRE(out.chunks.size() == 2);
        CHECK(out.chunks[1].samples == chunks[1].samples);
    }
}

TEST_CASE("chunk_buffer / concat_chunks") {
    const int sr = 16000;
    AudioBuffer buf = testutil::make_noise_clip(1.05, sr, 700);

    SUBCASE("slices at the chunk cadence with a short tail") {
        auto chunks = chunk_buffer(buf, 200.0);
        REQUIRE(chunks.size() == 6);
        for (int i = 0; i < 5; ++i) CHECK(chunks[i].samples.size() == 3200);
        CHECK(chunks[5].samples.size() == 800);
    }
    SUBCASE("concat inverts chunking exactly") {
        AudioBuffer back = concat_chunks(chunk_buffer(buf, 200.0));
        CHECK(back.samples == buf.samples);
        CHECK(back.sample_rate == buf.sample_rate);
    }
    SUBCASE("exact multiple leaves no tail") {
        AudioBuffer even = testutil::make_noise_clip(1.0, sr, 701);
        auto chunks = chunk_buffer(even, 200.0);
        CHECK(chunks.size() == 5);
    }
}
