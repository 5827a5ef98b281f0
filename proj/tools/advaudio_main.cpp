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

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <vector>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "advaudio/adversarial.hpp"
#include "advaudio/audio_io.hpp"
#include "advaudio/eval.hpp"
#include "advaudio/masking.hpp"
#include "advaudio/mfcc.hpp"
#include "advaudio/scheduler.hpp"

namespace {

using namespace advaudio;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitProcessing = 3;

void save_matrix_csv(const std::string& path, const Matrix& m) {
    std::ofstream out(path);
    if (!out) throw IoFailure("cannot write " + path);
    for (std::size_t r = 0; r < m.rows; ++r) {
        for (std::size_t c = 0; c < m.cols; ++c) {
            if (c) out << ',';
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.9g", m(r, c));
            out << buf;
        }
        out << "\n";
    }
}

void dump_stages(const std::string& dir, const MfccStages& st,
                 const std::optional<GainMap>& mask) {
    std::filesystem::create_directories(dir);
    save_matrix_csv(dir + "/frames.csv", st.frames);
    save_matrix_csv(dir + "/windowed.csv", st.windowed);
    save_matrix_csv(dir + "/power.csv", st.power);
    save_matrix_csv(dir + "/mel.csv", st.mel);
    save_matrix_csv(dir + "/cepstra.csv", st.cepstra);
    if (mask) save_matrix_csv(dir + "/gain_map.csv", mask->gains);
}

void write_trace_csv(const std::string& path, const NoiseSpectrum& noise) {
    std::ofstream out(path);
    if (!out) throw IoFailure("cannot write " + path);
    out << "iteration,cost,wall_ms\n";
    for (const auto& rec : noise.trace) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "%d,%.9g,%.3f\n", rec.iteration, rec.cost,
                      rec.wall_ms);
        out << buf;
    }
}

void write_decision_log(const std::string& path,
                        const std::vector<ScheduleDecision>& log) {
    std::ofstream out(path);
    if (!out) throw IoFailure("cannot write " + path);
    out << "chunk_index,iterations_granted,actual_ms,flagged\n";
    for (const auto& d : log) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "%d,%d,%.3f,%d\n", d.chunk_index,
                      d.iterations_granted, d.actual_ms, d.flagged ? 1 : 0);
        out << buf;
    }
}

GainMap build_mask(const MfccStages& stages, const MaskParams& params,
                   int sample_rate) {
    GainMap sens = sensitivity_mask(stages.power.rows, stages.power.cols,
                                    sample_rate, params);
    GainMap loud = loudness_mask(stages.power, params);
    return combine_masks(sens, loud);
}

struct GlobalOpts {
    std::uint64_t seed = 1;
    std::string dump_dir;
    bool verbose = false;
};

void add_mfcc_options(CLI::App* cmd, MfccConfig& cfg) {
    cmd->add_option("--alpha", cfg.alpha, "Pre-emphasis coefficient");
    cmd->add_option("--frame-ms", cfg.frame_len_ms, "Frame length, ms (20-40)");
    cmd->add_option("--hop-fraction", cfg.hop_fraction, "Frame advance fraction");
    cmd->add_option("--n-fft", cfg.n_fft, "FFT length (power of two)");
    cmd->add_option("--n-mels", cfg.n_mels, "Mel filter count (13-26)");
    cmd->add_option("--n-ceps", cfg.n_ceps, "Retained cepstral coefficients");
    cmd->add_option("--mel-fmin", cfg.mel_fmin, "Mel range low edge, Hz");
    cmd->add_option("--mel-fmax", cfg.mel_fmax, "Mel range high edge, Hz");
}

void add_attack_options(CLI::App* cmd, AttackConfig& cfg, bool& no_mask,
                        std::string& mode) {
    cmd->add_option("--iterations", cfg.iterations, "Gradient iterations");
    cmd->add_option("--step-size", cfg.step_size, "Per-iteration step");
    cmd->add_option("--t-adv", cfg.t_adv_scale, "Per-sample noise cap");
    cmd->add_flag("--no-mask", no_mask, "Disable psychoacoustic masking");
    cmd->add_option("--mode", mode, "away-from-clean | toward-target")
        ->check(CLI::IsMember({"away-from-clean", "toward-target"}));
}

AudioBuffer synth_test_chunk(double ms, int sample_rate, std::uint64_t seed) {
    AudioBuffer buf;
    buf.sample_rate = sample_rate;
    std::size_t len = static_cast<std::size_t>(ms * sample_rate / 1000.0);
    buf.samples.resize(len);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(-0.05, 0.05);
    for (std::size_t s = 0; s < len; ++s) {
        double t = static_cast<double>(s) / sample_rate;
        buf.samples[s] = 0.3 * std::sin(2.0 * std::numbers::pi * 220.0 * t) +
                         0.2 * std::sin(2.0 * std::numbers::pi * 660.0 * t) +
                         jitter(rng);
    }
    return buf;
}

int run(int argc, char** argv) {
    CLI::App app{"Adversarial speech perturbation toolkit"};
    app.set_config("--config", "", "Config file (TOML/INI), flags override");
    app.require_subcommand(1);

    GlobalOpts global;
    app.add_option("--seed", global.seed, "RNG seed")->capture_default_str();
    app.add_option("--dump-dir", global.dump_dir, "Dump intermediate CSV matrices");
    app.add_flag("--verbose", global.verbose, "Chatty progress on stderr");

    // ---- perturb ----
    auto* perturb = app.add_subcommand("perturb", "Perturb one WAV file");
    std::string in_path, out_path, env_wav, trace_path, report_path;
    double env_db = -1.0;
    MfccConfig p_mfcc;
    AttackConfig p_attack;
    bool p_no_mask = false;
    std::string p_mode = "away-from-clean";
    perturb->add_option("input", in_path, "Input WAV")->required();
    perturb->add_option("output", out_path, "Output WAV")->required();
    add_mfcc_options(perturb, p_mfcc);
    add_attack_options(perturb, p_attack, p_no_mask, p_mode);
    perturb->add_option("--env-wav", env_wav, "Environmental noise WAV");
    perturb->add_option("--env-db", env_db, "Environmental noise level, dB");
    perturb->add_option("--trace", trace_path, "Write per-iteration trace CSV");
    perturb->add_option("--report", report_path, "Report JSON path");

    // ---- eval ----
    auto* eval = app.add_subcommand("eval", "Batch evaluation from a manifest");
    std::string manifest_path, eval_out_dir = "eval_out", provider_kind;
    std::string stub_map, endpoint, auth_env;
    int timeout_ms = 30000;
    bool no_curve = false;
    MfccConfig e_mfcc;
    AttackConfig e_attack;
    bool e_no_mask = false;
    std::string e_mode = "away-from-clean";
    eval->add_option("manifest", manifest_path, "CSV manifest")->required();
    eval->add_option("--out-dir", eval_out_dir, "Report output directory");
    eval->add_option("--provider", provider_kind, "stub | external")
        ->check(CLI::IsMember({"stub", "external"}));
    eval->add_option("--stub-map", stub_map, "JSON clip_id -> transcript");
    eval->add_option("--endpoint", endpoint, "External transcription URL");
    eval->add_option("--timeout-ms", timeout_ms, "Request timeout");
    eval->add_option("--auth-env", auth_env, "Env var holding the auth token");
    eval->add_flag("--no-curve", no_curve, "Skip the per-iteration curve");
    add_mfcc_options(eval, e_mfcc);
    add_attack_options(eval, e_attack, e_no_mask, e_mode);

    // ---- stream ----
    auto* stream = app.add_subcommand("stream", "Chunked streaming perturbation");
    std::string s_in, s_out, s_log = "stream_log.csv", profile_name = "telephone";
    double budget_ms = 0.0, chunk_ms = 0.0;
    bool simulate_clock = false;
    double sim_fixed = 302.0, sim_per_iter = 42.0;
    MfccConfig s_mfcc;
    AttackConfig s_attack;
    bool s_no_mask = false;
    std::string s_mode = "away-from-clean";
    stream->add_option("input", s_in, "Input WAV")->required();
    stream->add_option("output", s_out, "Output WAV")->required();
    stream->add_option("--profile", profile_name, "telephone | messaging")
        ->check(CLI::IsMember({"telephone", "messaging"}));
    stream->add_option("--budget-ms", budget_ms, "Custom latency budget");
    stream->add_option("--chunk-ms", chunk_ms, "Chunk length, ms");
    stream->add_flag("--simulate-clock", simulate_clock,
                     "Use synthetic costs instead of the wall clock");
    stream->add_option("--sim-fixed-ms", sim_fixed, "Simulated warm-up cost");
    stream->add_option("--sim-per-iter-ms", sim_per_iter,
                       "Simulated per-iteration cost");
    stream->add_option("--log", s_log, "Decision log CSV path");
    add_mfcc_options(stream, s_mfcc);
    add_attack_options(stream, s_attack, s_no_mask, s_mode);

    // ---- bench ----
    auto* bench = app.add_subcommand("bench", "Per-iteration timing benchmark");
    std::string bench_csv;
    double b_chunk_ms = 200.0;
    int b_repeats = 3;
    bench->add_option("--chunk-ms", b_chunk_ms, "Synthetic chunk length");
    bench->add_option("--repeats", b_repeats, "Repetitions per configuration");
    bench->add_option("--csv", bench_csv, "Machine-readable output CSV");

    // ---- mfcc ----
    auto* mfcc_cmd = app.add_subcommand("mfcc", "Dump cepstral features");
    std::string m_in, m_out = "features.csv";
    MfccConfig m_mfcc;
    mfcc_cmd->add_option("input", m_in, "Input WAV")->required();
    mfcc_cmd->add_option("--out", m_out, "Feature CSV path");
    add_mfcc_options(mfcc_cmd, m_mfcc);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    auto parse_mode = [](const std::string& m) {
        return m == "toward-target" ? AttackMode::kTowardTarget
                                    : AttackMode::kAwayFromClean;
    };

    try {
        if (*perturb) {
            p_attack.use_masking = !p_no_mask;
            p_attack.mode = parse_mode(p_mode);
            if (!env_wav.empty()) {
                EnvNoiseProfile env;
                env.waveform = read_wav(env_wav);
                env.level_db = estimate_env_level(*env.waveform);
                p_attack.env_profile = env;
            } else if (env_db >= 0.0) {
                p_attack.env_profile = EnvNoiseProfile{env_db, std::nullopt};
            }
            p_attack.validate();

            AudioBuffer clip = read_wav(in_path);
            p_mfcc.validate(clip.sample_rate);

            auto t0 = std::chrono::steady_clock::now();
            MfccStages stages = mfcc_stages(clip, p_mfcc);
            std::optional<GainMap> mask;
            if (p_attack.use_masking) {
                mask = build_mask(stages, MaskParams{}, clip.sample_rate);
            }
            NoiseSpectrum noise = generate_noise(clip, p_mfcc, p_attack, mask);
            AudioBuffer adversarial = apply_noise(clip, noise);
            auto t1 = std::chrono::steady_clock::now();

            write_wav(adversarial, out_path);
            if (!trace_path.empty()) write_trace_csv(trace_path, noise);
            if (!global.dump_dir.empty()) dump_stages(global.dump_dir, stages, mask);

            nlohmann::json rep;
            rep["input"] = in_path;
            rep["output"] = out_path;
            rep["iterations"] = p_attack.iterations;
            rep["best_iteration"] = noise.best_iteration;
            rep["initial_cost"] = noise.initial_cost;
            rep["final_cost"] = noise.final_cost;
            rep["feature_distortion"] = feature_distortion(
                stages.cepstra, mfcc(adversarial, p_mfcc));
            double noise_rms = rms(noise.waveform);
            rep["noise_snr_db"] = noise_rms > 0.0
                                      ? snr_db(clip.samples, noise.waveform)
                                      : std::numeric_limits<double>::infinity();
            rep["total_ms"] =
                std::chrono::duration<double, std::milli>(t1 - t0).count();
            std::string rp = report_path.empty() ? out_path + ".report.json"
                                                 : report_path;
            std::ofstream rout(rp);
            rout << rep.dump(2) << "\n";
            if (global.verbose) std::cerr << "report: " << rp << "\n";
        } else if (*eval) {
            e_attack.use_masking = !e_no_mask;
            e_attack.mode = parse_mode(e_mode);
            e_attack.validate();

            BatchConfig cfg;
            cfg.mfcc = e_mfcc;
            cfg.attack = e_attack;
            cfg.seed = global.seed;
            cfg.with_curve = !no_curve;

            std::unique_ptr<TranscriptionProvider> provider;
            if (provider_kind == "stub") {
                if (stub_map.empty())
                    throw InvalidConfig("--provider stub requires --stub-map");
                provider = std::make_unique<StubProvider>(stub_map);
            } else if (provider_kind == "external") {
                if (endpoint.empty())
                    throw InvalidConfig("--provider external requires --endpoint");
                provider =
                    std::make_unique<HttpProvider>(endpoint, timeout_ms, auth_env);
            }

            auto clips = read_manifest(manifest_path);
            auto reports = run_batch(clips, cfg, provider.get(), eval_out_dir);
            if (global.verbose) {
                for (const auto& r : reports) {
                    std::cerr << r.clip_id << ": "
                              << (r.ok ? "ok" : r.error) << "\n";
                }
            }
        } else if (*stream) {
            s_attack.use_masking = !s_no_mask;
            s_attack.mode = parse_mode(s_mode);
            s_attack.validate();

            LatencyProfile profile = profile_name == "messaging"
                                         ? LatencyProfile::messaging()
                                         : LatencyProfile::telephone();
            if (budget_ms > 0.0) {
                profile.name = "custom";
                profile.budget_ms = budget_ms;
            }
            if (chunk_ms > 0.0) profile.chunk_ms = chunk_ms;

            AudioBuffer clip = read_wav(s_in);
            s_mfcc.validate(clip.sample_rate);
            auto chunks = chunk_buffer(clip, profile.chunk_ms);

            StreamOptions opts;
            opts.max_iterations = s_attack.iterations;
            if (simulate_clock) {
                double fixed = sim_fixed, per = sim_per_iter;
                opts.simulated_cost = [fixed, per](int chunk_index, int iters) {
                    return (chunk_index == 0 ? fixed : 0.0) + iters * per;
                };
                opts.init_fixed_ms = fixed;
                opts.init_per_iter_ms = per;
            }

            StreamResult result = process_stream(chunks, profile, s_mfcc,
                                                 s_attack, s_attack.use_masking,
                                                 opts);
            write_wav(concat_chunks(result.chunks), s_out);
            write_decision_log(s_log, result.log);
        } else if (*bench) {
            const int sample_rate = 16000;
            MfccConfig cfg;
            std::vector<int> iteration_set = {1, 2, 5, 10};

            AudioBuffer chunk = synth_test_chunk(b_chunk_ms, sample_rate, 7);
            {  // warm-up excluded from measurement
                AttackConfig warm;
                warm.iterations = 2;
                warm.use_masking = false;
                generate_noise(chunk, cfg, warm);
            }

            std::vector<std::pair<int, double>> rows;
            for (int k : iteration_set) {
                double best = std::numeric_limits<double>::infinity();
                for (int r = 0; r < b_repeats; ++r) {
                    AttackConfig a;
                    a.iterations = k;
                    a.use_masking = false;
                    auto t0 = std::chrono::steady_clock::now();
                    generate_noise(chunk, cfg, a);
                    auto t1 = std::chrono::steady_clock::now();
                    best = std::min(
                        best,
                        std::chrono::duration<double, std::milli>(t1 - t0).count());
                }
                rows.emplace_back(k, best);
            }

            double per_iter =
                (rows.back().second - rows.front().second) /
                (rows.back().first - rows.front().first);
            double fixed = rows.front().second - per_iter * rows.front().first;

            std::printf("%-12s %s\n", "iterations", "total_ms");
            for (auto& [k, ms] : rows) std::printf("%-12d %.3f\n", k, ms);
            std::printf("fixed_ms      %.3f\n", std::max(0.0, fixed));
            std::printf("per_iter_ms   %.3f\n", per_iter);

            if (!bench_csv.empty()) {
                std::ofstream out(bench_csv);
                out << "iterations,total_ms,fixed_ms,per_iter_ms\n";
                for (auto& [k, ms] : rows) {
                    char buf[96];
                    std::snprintf(buf, sizeof buf, "%d,%.3f,%.3f,%.3f\n", k, ms,
                                  std::max(0.0, fixed), per_iter);
                    out << buf;
                }
            }
        } else if (*mfcc_cmd) {
            AudioBuffer clip = read_wav(m_in);
            m_mfcc.validate(clip.sample_rate);
            MfccStages stages = mfcc_stages(clip, m_mfcc);
            save_matrix_csv(m_out, stages.cepstra);
            if (!global.dump_dir.empty())
                dump_stages(global.dump_dir, stages, std::nullopt);
        }
    } catch (const InvalidConfig& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const SampleRateMismatch& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitProcessing;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
