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

#include "advaudio/matrix.hpp"

namespace advaudio {

struct MaskParams {
    double sensitive_lo = 200.0;    // Hz
    double sensitive_hi = 5000.0;   // Hz
    double in_band_gain = 0.2;      // attenuation inside the sensitive band
    double top_percent = 10.0;      // t% loudest bins seed the boost regions
    std::size_t neighborhood_bins = 3;
    double boost_gain = 1.0;
};

/// Per-bin amplitude gains in [0, 1], one row per frame.
struct GainMap {
    Matrix gains;
    MaskParams params;
};

/// Frequency-sensitivity mask: in_band_gain on bins whose center frequency
/// lies in [sensitive_lo, sensitive_hi] (closed interval), 1.0 elsewhere.
/// Identical across frames.
GainMap sensitivity_mask(std::size_t n_frames, std::size_t n_bins,
                         int sample_rate, const MaskParams& params);

/// Adjacent-loudness mask: per frame, the top ceil(n_bins * t / 100) bins by
/// power (ties broken by ascending bin index) and their +-neighborhood_bins
/// neighbors get boost_gain; everything else 0. Combined with max, so 0 means
/// "no boost".
GainMap loudness_mask(const Matrix& power, const MaskParams& params);

/// Cellwise max of the two maps: loudness neighborhoods override the in-band
/// attenuation.
GainMap combine_masks(const GainMap& sensitivity, const GainMap& loudness);

}  // namespace advaudio
