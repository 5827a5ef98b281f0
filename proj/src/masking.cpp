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

#include "advaudio/masking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "advaudio/errors.hpp"

namespace advaudio {

GainMap sensitivity_mask(std::size_t n_frames, std::size_t n_bins,
                         int sample_rate, const MaskParams& params) {
    GainMap map;
    map.params = params;
    map.gains = Matrix(n_frames, n_bins, 1.0);
    const std::size_t n_fft = (n_bins - 1) * 2;
    for (std::size_t k = 0; k < n_bins; ++k) {
        double freq = static_cast<double>(k) * sample_rate / n_fft;
        if (freq >= params.sensitive_lo && freq <= params.sensitive_hi) {
            for (std::size_t n = 0; n < n_frames; ++n) {
                map.gains(n, k) = params.in_band_gain;
            }
        }
    }
    return map;
}

GainMap loudness_mask(const Matrix& power, const MaskParams& params) {
    GainMap map;
    map.params = params;
    map.gains = Matrix(power.rows, power.cols, 0.0);

    const std::size_t n_bins = power.cols;
    const std::size_t n_seeds = std::min<std::size_t>(
        n_bins,
        static_cast<std::size_t>(std::ceil(n_bins * params.top_percent / 100.0)));

    std::vector<std::size_t> order(n_bins);
    for (std::size_t n = 0; n < power.rows; ++n) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) {
                             return power(n, a) > power(n, b);
                         });
        for (std::size_t s = 0; s < n_seeds; ++s) {
            std::size_t k = order[s];
            std::size_t lo = k >= params.neighborhood_bins
                                 ? k - params.neighborhood_bins
                                 : 0;
            std::size_t hi = std::min(n_bins - 1, k + params.neighborhood_bins);
            for (std::size_t j = lo; j <= hi; ++j) {
                map.gains(n, j) = params.boost_gain;
            }
        }
    }
    return map;
}

GainMap combine_masks(const GainMap& sensitivity, const GainMap& loudness) {
    if (!sensitivity.gains.same_shape(loudness.gains)) {
        throw DimensionMismatch("gain map shapes differ");
    }
    GainMap out = sensitivity;
    for (std::size_t i = 0; i < out.gains.data.size(); ++i) {
        out.gains.data[i] = std::max(out.gains.data[i], loudness.gains.data[i]);
    }
    return out;
}

}  // namespace advaudio
