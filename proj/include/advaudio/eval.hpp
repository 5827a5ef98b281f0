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

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "advaudio/adversarial.hpp"
#include "advaudio/audio_io.hpp"
#include "advaudio/masking.hpp"
#include "advaudio/matrix.hpp"
#include "advaudio/mfcc.hpp"

namespace advaudio {

/// Lowercase, punctuation-stripped, whitespace-split word sequence.
struct Transcript {
    std::vector<std::string> words;

    static Transcript normalize(const std::string& text);
};

/// (S + D + I) / N over a minimum-edit-distance word alignment.
/// May exceed 1 with insertions; reported unclamped.
double word_error_rate(const Transcript& reference, const Transcript& hypothesis);

/// Mean over frames of the Euclidean norm of the per-frame coefficient
/// difference. Desk-scale proxy for WER when no ASR is wired up.
double feature_distortion(const Matrix& clean, const Matrix& adv);

/// Adds zero-mean uniform noise scaled to the exact target SNR.
/// Deterministic per seed.
AudioBuffer random_noise_baseline(const AudioBuffer& buffer, double target_snr_db,
                                  std::uint64_t seed);

double rms(const std::vector<double>& x);
double snr_db(const std::vector<double>& signal, const std::vector<double>& noise);

class TranscriptionProvider {
  public:
    virtual ~TranscriptionProvider() = default;
    virtual Transcript transcribe(const AudioBuffer& buffer,
                                  const std::string& clip_id) = 0;
};

/// Offline provider backed by a JSON mapping file {clip_id: "transcript"}.
class StubProvider : public TranscriptionProvider {
  public:
    explicit StubProvider(const std::string& mapping_path);
    explicit StubProvider(std::map<std::string, std::string> mapping);
    Transcript transcribe(const AudioBuffer& buffer,
                          const std::string& clip_id) override;

  private:
    std::map<std::string, std::string> mapping_;
};

/// Posts WAV bytes to a transcription endpoint and normalizes the response
/// (JSON {"text": ...} or plain text) into a Transcript.
class HttpProvider : public TranscriptionProvider {
  public:
    HttpProvider(const std::string& endpoint_url, int timeout_ms = 30000,
                 const std::string& auth_token_env = "");
    Transcript transcribe(const AudioBuffer& buffer,
                          const std::string& clip_id) override;

  private:
    std::string host_;
    int port_ = 80;
    std::string path_;
    int timeout_ms_;
    std::string auth_token_env_;
};

struct ManifestEntry {
    std::string clip_id;
    std::string wav_path;
    std::string reference_text;
};

/// Parses the CSV manifest (columns clip_id, wav_path, reference_text).
std::vector<ManifestEntry> read_manifest(const std::string& path);

struct BatchConfig {
    MfccConfig mfcc;
    AttackConfig attack;
    MaskParams mask;
    std::vector<int> iteration_curve = {1, 3, 5, 10};
    std::uint64_t seed = 1;
    bool with_curve = true;
};

struct PerturbationReport {
    std::string clip_id;
    bool ok = false;
    std::string error;
    double wer_clean = -1.0;  // -1 when no provider configured
    double wer_adv = -1.0;
    double feature_distortion_adv = 0.0;
    double feature_distortion_unmasked = 0.0;
    double feature_distortion_random = 0.0;
    double noise_snr_db = 0.0;
    int iterations = 0;
    double total_ms = 0.0;
    std::vector<std::pair<int, double>> distortion_curve;  // (iterations, distortion)
};

/// Runs masked and unmasked attacks plus a matched-SNR random baseline on
/// every clip; per-clip failures are recorded and the batch continues.
/// Writes per-clip JSON reports and one aggregate CSV under out_dir when
/// out_dir is nonempty.
std::vector<PerturbationReport> run_batch(const std::vector<ManifestEntry>& clips,
                                          const BatchConfig& config,
                                          TranscriptionProvider* provider,
                                          const std::string& out_dir);

std::string report_to_json(const PerturbationReport& report);
std::string aggregate_csv(const std::vector<PerturbationReport>& reports,
                          const std::vector<int>& iteration_curve);

}  // namespace advaudio
