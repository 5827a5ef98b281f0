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

#include "advaudio/eval.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

namespace advaudio {

using nlohmann::json;

Transcript Transcript::normalize(const std::string& text) {
    Transcript t;
    std::string word;
    auto flush = [&] {
        if (!word.empty()) {
            t.words.push_back(word);
            word.clear();
        }
    };
    for (unsigned char c : text) {
        if (std::isspace(c)) {
            flush();
        } else if (std::isalnum(c) || c == '\'') {
            word.push_back(static_cast<char>(std::tolower(c)));
        }
        // other punctuation is stripped
    }
    flush();
    return t;
}

double word_error_rate(const Transcript& reference, const Transcript& hypothesis) {
    if (reference.words.empty()) throw EmptyReference("reference transcript empty");
    const std::size_t n = reference.words.size();
    const std::size_t m = hypothesis.words.size();
    std::vector<std::size_t> prev(m + 1), cur(m + 1);
    for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
    for (std::size_t i = 1; i <= n; ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= m; ++j) {
            std::size_t sub =
                prev[j - 1] + (reference.words[i - 1] == hypothesis.words[j - 1] ? 0 : 1);
            cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
        }
        std::swap(prev, cur);
    }
    return static_cast<double>(prev[m]) / static_cast<double>(n);
}

double feature_distortion(const Matrix& clean, const Matrix& adv) {
    if (!clean.same_shape(adv)) throw DimensionMismatch("feature shapes differ");
    double acc = 0.0;
    for (std::size_t n = 0; n < clean.rows; ++n) {
        double sq = 0.0;
        for (std::size_t i = 0; i < clean.cols; ++i) {
            double d = clean(n, i) - adv(n, i);
            sq += d * d;
        }
        acc += std::sqrt(sq);
    }
    return acc / static_cast<double>(clean.rows);
}

double rms(const std::vector<double>& x) {
    if (x.empty()) return 0.0;
    double acc = 0.0;
    for (double v : x) acc += v * v;
    return std::sqrt(acc / x.size());
}

double snr_db(const std::vector<double>& signal, const std::vector<double>& noise) {
    double ps = rms(signal);
    double pn = rms(noise);
    return 10.0 * std::log10((ps * ps) / (pn * pn));
}

AudioBuffer random_noise_baseline(const AudioBuffer& buffer, double target_snr_db,
                                  std::uint64_t seed) {
    if (buffer.samples.empty()) throw EmptyAudio("empty input");
    double sig_rms = rms(buffer.samples);
    if (sig_rms <= 0.0) throw SilentInput("SNR undefined for silent input");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> noise(buffer.samples.size());
    double mean = 0.0;
    for (double& v : noise) {
        v = dist(rng);
        mean += v;
    }
    mean /= noise.size();
    for (double& v : noise) v -= mean;  // exactly zero-mean

    double target_rms = sig_rms * std::pow(10.0, -target_snr_db / 20.0);
    double cur = rms(noise);
    double scale = cur > 0.0 ? target_rms / cur : 0.0;

    AudioBuffer out = buffer;
    for (std::size_t s = 0; s < noise.size(); ++s) {
        out.samples[s] = buffer.samples[s] + noise[s] * scale;
    }
    return out;
}

StubProvider::StubProvider(const std::string& mapping_path) {
    std::ifstream in(mapping_path);
    if (!in) throw IoFailure("cannot open stub mapping " + mapping_path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw IoFailure(std::string("bad stub mapping: ") + e.what());
    }
    for (auto& [key, value] : j.items()) {
        mapping_[key] = value.get<std::string>();
    }
}

StubProvider::StubProvider(std::map<std::string, std::string> mapping)
    : mapping_(std::move(mapping)) {}

Transcript StubProvider::transcribe(const AudioBuffer&, const std::string& clip_id) {
    auto it = mapping_.find(clip_id);
    if (it == mapping_.end()) throw UnmappedClip("no stub transcript for " + clip_id);
    return Transcript::normalize(it->second);
}

HttpProvider::HttpProvider(const std::string& endpoint_url, int timeout_ms,
                           const std::string& auth_token_env)
    : timeout_ms_(timeout_ms), auth_token_env_(auth_token_env) {
    std::string url = endpoint_url;
    const std::string scheme = "http://";
    if (url.rfind(scheme, 0) != 0) {
        throw InvalidConfig("endpoint must be an http:// URL");
    }
    url = url.substr(scheme.size());
    std::size_t slash = url.find('/');
    std::string hostport = slash == std::string::npos ? url : url.substr(0, slash);
    path_ = slash == std::string::npos ? "/" : url.substr(slash);
    std::size_t colon = hostport.find(':');
    if (colon == std::string::npos) {
        host_ = hostport;
        port_ = 80;
    } else {
        host_ = hostport.substr(0, colon);
        port_ = std::stoi(hostport.substr(colon + 1));
    }
}

Transcript HttpProvider::transcribe(const AudioBuffer& buffer,
                                    const std::string& clip_id) {
    auto t0 = std::chrono::steady_clock::now();
    httplib::Client client(host_, port_);
    client.set_connection_timeout(timeout_ms_ / 1000, (timeout_ms_ % 1000) * 1000);
    client.set_read_timeout(timeout_ms_ / 1000, (timeout_ms_ % 1000) * 1000);

    httplib::Headers headers{{"X-Clip-Id", clip_id}};
    if (!auth_token_env_.empty()) {
        if (const char* token = std::getenv(auth_token_env_.c_str())) {
            headers.emplace("Authorization", std::string("Bearer ") + token);
        }
    }

    std::vector<unsigned char> wav = encode_wav(buffer);
    auto res = client.Post(path_, headers,
                           reinterpret_cast<const char*>(wav.data()), wav.size(),
                           "audio/wav");
    auto t1 = std::chrono::steady_clock::now();
    double elapsed = std::chrono::duration<double, std::milli>(t1 - t0).count();
    if (!res || res->status != 200) {
        throw ProviderUnavailable("transcription request failed after " +
                                  std::to_string(elapsed) + " ms");
    }
    // accept either {"text": "..."} or a plain-text body
    try {
        json j = json::parse(res->body);
        if (j.is_object() && j.contains("text")) {
            return Transcript::normalize(j["text"].get<std::string>());
        }
    } catch (const json::exception&) {
    }
    return Transcript::normalize(res->body);
}

std::vector<ManifestEntry> read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open manifest " + path);

    std::vector<ManifestEntry> entries;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        // minimal CSV: quoted fields may contain commas and doubled quotes
        std::vector<std::string> fields;
        std::string field;
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            char c = line[i];
            if (quoted) {
                if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else if (c == '"') {
                    quoted = false;
                } else {
                    field.push_back(c);
                }
            } else if (c == '"') {
                quoted = true;
            } else if (c == ',') {
                fields.push_back(field);
                field.clear();
            } else {
                field.push_back(c);
            }
        }
        fields.push_back(field);

        if (first && !fields.empty() && fields[0] == "clip_id") {
            first = false;
            continue;  // header row
        }
        first = false;
        if (fields.size() < 3) throw IoFailure("manifest row needs 3 columns: " + line);
        entries.push_back({fields[0], fields[1], fields[2]});
    }
    return entries;
}

namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

}  // namespace

std::string report_to_json(const PerturbationReport& r) {
    json j;
    j["clip_id"] = r.clip_id;
    j["ok"] = r.ok;
    j["error"] = r.error;
    if (r.wer_clean >= 0.0) j["wer_clean"] = r.wer_clean;
    if (r.wer_adv >= 0.0) j["wer_adv"] = r.wer_adv;
    j["feature_distortion_adv"] = r.feature_distortion_adv;
    j["feature_distortion_unmasked"] = r.feature_distortion_unmasked;
    j["feature_distortion_random"] = r.feature_distortion_random;
    j["noise_snr_db"] = r.noise_snr_db;
    j["iterations"] = r.iterations;
    j["total_ms"] = r.total_ms;
    json curve = json::array();
    for (auto& [k, d] : r.distortion_curve) {
        curve.push_back({{"iterations", k}, {"distortion", d}});
    }
    j["distortion_curve"] = curve;
    return j.dump(2);
}

std::string aggregate_csv(const std::vector<PerturbationReport>& reports,
                          const std::vector<int>& iteration_curve) {
    std::ostringstream out;
    // wall-clock timings live in the per-clip JSON reports; keeping them out
    // of the CSV makes the aggregate byte-identical across runs
    out << "clip_id,ok,error,wer_clean,wer_adv,distortion_adv,"
           "distortion_unmasked,distortion_random,noise_snr_db,iterations";
    for (int k : iteration_curve) out << ",distortion_iter_" << k;
    out << "\n";
    for (const auto& r : reports) {
        std::string err = r.error;
        std::replace(err.begin(), err.end(), ',', ';');
        out << r.clip_id << ',' << (r.ok ? 1 : 0) << ',' << err << ','
            << fmt_double(r.wer_clean) << ',' << fmt_double(r.wer_adv) << ','
            << fmt_double(r.feature_distortion_adv) << ','
            << fmt_double(r.feature_distortion_unmasked) << ','
            << fmt_double(r.feature_distortion_random) << ','
            << fmt_double(r.noise_snr_db) << ',' << r.iterations;
        for (std::size_t c = 0; c < iteration_curve.size(); ++c) {
            double v = c < r.distortion_curve.size() ? r.distortion_curve[c].second
                                                     : 0.0;
            out << ',' << fmt_double(v);
        }
        out << "\n";
    }
    return out.str();
}

std::vector<PerturbationReport> run_batch(const std::vector<ManifestEntry>& clips,
                                          const BatchConfig& config,
                                          TranscriptionProvider* provider,
                                          const std::string& out_dir) {
    std::vector<PerturbationReport> reports;
    reports.reserve(clips.size());

    for (const auto& entry : clips) {
        PerturbationReport rep;
        rep.clip_id = entry.clip_id;
        auto t0 = std::chrono::steady_clock::now();
        try {
            AudioBuffer clip = read_wav(entry.wav_path);
            if (rms(clip.samples) <= 0.0) throw SilentInput("clip is silent");

            Matrix clean = mfcc(clip, config.mfcc);

            AttackConfig masked_cfg = config.attack;
            masked_cfg.use_masking = true;
            NoiseSpectrum noise = generate_noise(clip, config.mfcc, masked_cfg);
            AudioBuffer adversarial = apply_noise(clip, noise);
            rep.feature_distortion_adv =
                feature_distortion(clean, mfcc(adversarial, config.mfcc));
            rep.iterations = config.attack.iterations;

            AttackConfig unmasked_cfg = config.attack;
            unmasked_cfg.use_masking = false;
            NoiseSpectrum unmasked = generate_noise(clip, config.mfcc, unmasked_cfg);
            rep.feature_distortion_unmasked = feature_distortion(
                clean, mfcc(apply_noise(clip, unmasked), config.mfcc));

            // random baseline at the adversarial noise's SNR (fairness)
            double noise_rms = rms(noise.waveform);
            if (noise_rms > 0.0) {
                rep.noise_snr_db = snr_db(clip.samples, noise.waveform);
                AudioBuffer randomized =
                    random_noise_baseline(clip, rep.noise_snr_db, config.seed);
                rep.feature_distortion_random =
                    feature_distortion(clean, mfcc(randomized, config.mfcc));
            } else {
                rep.noise_snr_db = std::numeric_limits<double>::infinity();
            }

            if (config.with_curve) {
                for (int k : config.iteration_curve) {
                    AttackConfig curve_cfg = config.attack;
                    curve_cfg.iterations = k;
                    NoiseSpectrum n = generate_noise(clip, config.mfcc, curve_cfg);
                    double d = feature_distortion(
                        clean, mfcc(apply_noise(clip, n), config.mfcc));
                    rep.distortion_curve.emplace_back(k, d);
                }
            }

            if (provider != nullptr) {
                Transcript ref = Transcript::normalize(entry.reference_text);
                rep.wer_clean = word_error_rate(
                    ref, provider->transcribe(clip, entry.clip_id));
                rep.wer_adv = word_error_rate(
                    ref, provider->transcribe(adversarial, entry.clip_id));
            }
            rep.ok = true;
        } catch (const Error& e) {
            rep.ok = false;
            rep.error = e.what();
        }
        auto t1 = std::chrono::steady_clock::now();
        rep.total_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        reports.push_back(std::move(rep));
    }

    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        for (const auto& r : reports) {
            std::ofstream out(out_dir + "/" + r.clip_id + ".json");
            out << report_to_json(r) << "\n";
        }
        std::ofstream agg(out_dir + "/aggregate.csv");
        agg << aggregate_csv(reports, config.iteration_curve);
    }
    return reports;
}

}  // namespace advaudio
