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

#include <cmath>
#include <random>

#include "advaudio/fft.hpp"
#include "advaudio/mfcc.hpp"
#include "test_util.hpp"

using namespace advaudio;

TEST_CASE("pre_emphasize") {
    SUBCASE("zeros stay zero") {
        AudioBuffer out = pre_emphasize({{0.0, 0.0, 0.0}, 16000}, 0.97);
        for (double s : out.samples) CHECK(s == 0.0);
    }
    SUBCASE("direct evaluation") {
        AudioBuffer out = pre_emphasize({{1.0, 1.0}, 16000}, 0.97);
        CHECK(out.samples[0] == doctest::Approx(1.0));
        CHECK(out.samples[1] == doctest::Approx(0.03));
    }
    SUBCASE("empty input") {
        CHECK_THROWS_AS(pre_emphasize({{}, 16000}, 0.97), EmptyAudio);
    }
    SUBCASE("boosts the high-frequency energy ratio") {
        AudioBuffer x = testutil::make_noise_clip(1.0, 16000, 3);
        // shape the noise toward low frequencies first so the ratio can move
        for (std::size_t s = 1; s < x.samples.size(); ++s) {
            x.samples[s] = 0.7 * x.samples[s - 1] + 0.3 * x.samples[s];
        }
        AudioBuffer y = pre_emphasize(x, 0.97);

        auto hf_ratio = [](const AudioBuffer& b) {
            auto spec = fft_real(b.samples.data(), b.samples.size(), 16384);
            double hi = 0.0, total = 0.0;
            for (std::size_t k = 0; k <= 8192; ++k) {
                double p = std::norm(spec[k]);
                total += p;
                if (k > 4096) hi += p;
            }
            return hi / total;
        };
        CHECK(hf_ratio(y) > hf_ratio(x));
    }
}

TEST_CASE("frame_signal") {
    MfccConfig cfg;  // 25 ms / 50% at 16 kHz -> 400 / 200

    SUBCASE("single frame is the input") {
        AudioBuffer x = testutil::make_noise_clip(0.025, 16000, 1);
        REQUIRE(x.samples.size() == 400);
        Matrix f = frame_signal(x, cfg);
        CHECK(f.rows == 1);
        CHECK(f.cols == 400);
        for (std::size_t m = 0; m < 400; ++m) CHECK(f(0, m) == x.samples[m]);
    }
    SUBCASE("50% overlap") {
        AudioBuffer x = testutil::make_noise_clip(0.0375, 16000, 2);
        REQUIRE(x.samples.size() == 600);
        Matrix f = frame_signal(x, cfg);
        CHECK(f.rows == 2);
        for (std::size_t m = 0; m < 400; ++m) {
            CHECK(f(0, m) == x.samples[m]);
            CHECK(f(1, m) == x.samples[200 + m]);
        }
    }
    SUBCASE("1 s at 16 kHz gives 79 frames") {
        AudioBuffer x = testutil::make_noise_clip(1.0, 16000, 3);
        REQUIRE(x.samples.size() == 16000);
        CHECK(frame_signal(x, cfg).rows == 79);
    }
    SUBCASE("tail frame emitted when at least half a frame remains uncovered") {
        MfccConfig nohop = cfg;
        nohop.hop_fraction = 1.0;  // hop = 400, no overlap
        AudioBuffer x = testutil::make_noise_clip(0.0625, 16000, 4);
        REQUIRE(x.samples.size() == 1000);  // 2 full frames + 200 uncovered
        Matrix f = frame_signal(x, nohop);
        CHECK(f.rows == 3);
        for (std::size_t m = 0; m < 200; ++m) CHECK(f(2, m) == x.samples[800 + m]);
        for (std::size_t m = 200; m < 400; ++m) CHECK(f(2, m) == 0.0);

        x.samples.resize(950);  // 150 uncovered: dropped
        CHECK(frame_signal(x, nohop).rows == 2);
    }
    SUBCASE("too short") {
        AudioBuffer x = testutil::make_noise_clip(0.02, 16000, 5);
        CHECK_THROWS_AS(frame_signal(x, cfg), AudioTooShort);
    }
}

TEST_CASE("hamming window") {
    SUBCASE("edges and center") {
        auto w = hamming_window(401);
        CHECK(w[0] == doctest::Approx(0.08));
        CHECK(w[200] == doctest::Approx(1.0));
        CHECK(w[400] == doctest::Approx(0.08));
    }
    SUBCASE("symmetry") {
        auto w = hamming_window(400);
        for (std::size_t i = 0; i < 400; ++i) {
            CHECK(w[i] == doctest::Approx(w[399 - i]).epsilon(1e-12));
        }
    }
    SUBCASE("apply_window multiplies elementwise") {
        Matrix frames(1, 5, 1.0);
        Matrix out = apply_window(frames);
        auto w = hamming_window(5);
        for (std::size_t m = 0; m < 5; ++m) CHECK(out(0, m) == doctest::Approx(w[m]));
    }
}

TEST_CASE("power_spectrum") {
    SUBCASE("zero frame") {
        Matrix frames(1, 8, 0.0);
        Matrix p = power_spectrum(frames, 8);
        for (double v : p.data) CHECK(v == 0.0);
    }
    SUBCASE("unit impulse is flat 1/8") {
        Matrix frames(1, 8, 0.0);
        frames(0, 0) = 1.0;
        Matrix p = power_spectrum(frames, 8);
        REQUIRE(p.cols == 5);
        for (double v : p.data) CHECK(v == doctest::Approx(0.125).epsilon(1e-12));
    }
    SUBCASE("matches the O(N^2) DFT oracle") {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        std::vector<double> frame(400);
        for (double& v : frame) v = dist(rng);
        Matrix frames(1, 400, 0.0);
        for (std::size_t m = 0; m < 400; ++m) frames(0, m) = frame[m];
        Matrix p = power_spectrum(frames, 512);
        auto oracle = testutil::dft_power_oracle(frame, 512);
        for (std::size_t k = 0; k < p.cols; ++k) {
            CHECK(std::abs(p(0, k) - oracle[k]) < 1e-9);
        }
    }
    SUBCASE("invalid fft length") {
        Matrix frames(1, 400, 0.0);
        CHECK_THROWS_AS(power_spectrum(frames, 500), InvalidFftLength);
        CHECK_THROWS_AS(power_spectrum(frames, 256), InvalidFftLength);
    }
}

TEST_CASE("mel filter bank") {
    MfccConfig cfg;
    const int sr = 16000;

    SUBCASE("zero power maps to zero mel") {
        Matrix p(3, cfg.n_bins(), 0.0);
        Matrix mel = mel_filter_bank(p, cfg, sr);
        for (double v : mel.data) CHECK(v == 0.0);
    }
    SUBCASE("each filter peaks at exactly 1.0 and interior bins are covered") {
        Matrix bank = build_mel_filter_bank(cfg, sr);
        std::size_t first_center = cfg.n_bins(), last_center = 0;
        for (std::size_t l = 0; l < bank.rows; ++l) {
            double peak = 0.0;
            std::size_t peak_bin = 0;
            for (std::size_t k = 0; k < bank.cols; ++k) {
                if (bank(l, k) > peak) {
                    peak = bank(l, k);
                    peak_bin = k;
                }
            }
            CHECK(peak == 1.0);
            first_center = std::min(first_center, peak_bin);
            last_center = std::max(last_center, peak_bin);
        }
        for (std::size_t k = first_center; k <= last_center; ++k) {
            double col_sum = 0.0;
            for (std::size_t l = 0; l < bank.rows; ++l) col_sum += bank(l, k);
            CHECK(col_sum > 0.0);
        }
    }
    SUBCASE("linearity: doubling power doubles mel") {
        AudioBuffer x = testutil::make_noise_clip(0.1, sr, 8);
        Matrix p = power_spectrum(apply_window(frame_signal(x, cfg)), cfg.n_fft);
        Matrix p2 = p;
        for (double& v : p2.data) v *= 2.0;
        Matrix mel = mel_filter_bank(p, cfg, sr);
        Matrix mel2 = mel_filter_bank(p2, cfg, sr);
        for (std::size_t i = 0; i < mel.data.size(); ++i) {
            CHECK(mel2.data[i] == doctest::Approx(2.0 * mel.data[i]).epsilon(1e-12));
        }
    }
    SUBCASE("dimension mismatch") {
        Matrix p(1, 100, 0.0);
        CHECK_THROWS_AS(mel_filter_bank(p, cfg, sr), DimensionMismatch);
    }
}

TEST_CASE("dct_cepstrum") {
    SUBCASE("constant mel row") {
        const double v = 3.5;
        Matrix mel(1, 26, v);
        Matrix c = dct_cepstrum(mel, 13);
        CHECK(c(0, 0) == doctest::Approx(26.0 * std::log(v + 1e-10)).epsilon(1e-12));
        for (std::size_t i = 1; i < 13; ++i) {
            CHECK(std::abs(c(0, i)) < 1e-9);
        }
    }
    SUBCASE("all-zero mel row hits the log floor") {
        Matrix mel(1, 26, 0.0);
        Matrix c = dct_cepstrum(mel, 13);
        CHECK(c(0, 0) == doctest::Approx(26.0 * std::log(1e-10)).epsilon(1e-12));
        for (std::size_t i = 1; i < 13; ++i) CHECK(std::abs(c(0, i)) < 1e-9);
    }
    SUBCASE("matches the double-loop oracle") {
        std::mt19937_64 rng(9);
        std::uniform_real_distribution<double> dist(0.0, 10.0);
        Matrix mel(1, 26, 0.0);
        std::vector<double> row(26);
        for (std::size_t l = 0; l < 26; ++l) {
            row[l] = dist(rng);
            mel(0, l) = row[l];
        }
        Matrix c = dct_cepstrum(mel, 13);
        auto oracle = testutil::dct_oracle(row, 13);
        for (std::size_t i = 0; i < 13; ++i) {
            CHECK(std::abs(c(0, i) - oracle[i]) < 1e-9);
        }
    }
}

TEST_CASE("full mfcc pipeline") {
    MfccConfig cfg;
    const int sr = 16000;

    SUBCASE("silence propagates to the constant floor cepstrum") {
        AudioBuffer x{std::vector<double>(16000, 0.0), sr};
        Matrix c = mfcc(x, cfg);
        for (std::size_t n = 0; n < c.rows; ++n) {
            CHECK(c(n, 0) == doctest::Approx(26.0 * std::log(1e-10)).epsilon(1e-12));
            for (std::size_t i = 1; i < c.cols; ++i) CHECK(std::abs(c(n, i)) < 1e-9);
        }
    }
    SUBCASE("frame count contract") {
        AudioBuffer x = testutil::make_speech_clip(0.7, sr, 10);
        MfccStages st = mfcc_stages(x, cfg);
        CHECK(st.cepstra.rows == st.frames.rows);
        CHECK(st.power.rows == st.frames.rows);
        CHECK(st.frames.cols == 400);
        CHECK(st.power.cols == 257);
        CHECK(st.mel.cols == 26);
        CHECK(st.cepstra.cols == 13);
    }
    SUBCASE("440 Hz sine matches the straight-line reference") {
        AudioBuffer x = testutil::make_tone(1.0, sr, 440.0);
        Matrix c = mfcc(x, cfg);
        Matrix ref = testutil::reference_mfcc(x, cfg);
        REQUIRE(c.same_shape(ref));
        for (std::size_t i = 0; i < c.data.size(); ++i) {
            CHECK(std::abs(c.data[i] - ref.data[i]) < 1e-6);
        }
    }
    SUBCASE("nonnegativity of power and mel") {
        AudioBuffer x = testutil::make_speech_clip(0.5, sr, 11);
        MfccStages st = mfcc_stages(x, cfg);
        for (double v : st.power.data) CHECK(v >= 0.0);
        for (double v : st.mel.data) CHECK(v >= 0.0);
    }
    SUBCASE("scaling the waveform by g scales power and mel by g^2") {
        AudioBuffer x = testutil::make_speech_clip(0.3, sr, 12);
        AudioBuffer x2 = x;
        const double g = 0.5;
        for (double& s : x2.samples) s *= g;
        MfccStages a = mfcc_stages(x, cfg);
        MfccStages b = mfcc_stages(x2, cfg);
        for (std::size_t i = 0; i < a.power.data.size(); ++i) {
            CHECK(b.power.data[i] ==
                  doctest::Approx(g * g * a.power.data[i]).epsilon(1e-9));
        }
        for (std::size_t i = 0; i < a.mel.data.size(); ++i) {
            CHECK(b.mel.data[i] ==
                  doctest::Approx(g * g * a.mel.data[i]).epsilon(1e-9));
        }
    }
    SUBCASE("determinism: identical inputs give bit-identical features") {
        AudioBuffer x = testutil::make_speech_clip(0.4, sr, 13);
        Matrix c1 = mfcc(x, cfg);
        Matrix c2 = mfcc(x, cfg);
        CHECK(c1.data == c2.data);
    }
    SUBCASE("config validation names the offending key") {
        MfccConfig bad = cfg;
        bad.alpha = 1.5;
        CHECK_THROWS_WITH_AS(bad.validate(sr), "alpha must satisfy 0 < alpha < 1",
                             InvalidConfig);
        bad = cfg;
        bad.n_fft = 300;
        CHECK_THROWS_AS(bad.validate(sr), InvalidConfig);
        bad = cfg;
        bad.n_mels = 30;
        CHECK_THROWS_AS(bad.validate(sr), InvalidConfig);
        bad = cfg;
        bad.n_ceps = 27;
        CHECK_THROWS_AS(bad.validate(sr), InvalidConfig);
        bad = cfg;
        bad.frame_len_ms = 50.0;
        CHECK_THROWS_AS(bad.validate(sr), InvalidConfig);
        bad = cfg;
        bad.mel_fmax = 9000.0;
        CHECK_THROWS_AS(bad.validate(sr), InvalidConfig);
    }
}
