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

#include <complex>
#include <vector>

namespace advaudio {

/// In-place radix-2 FFT. Size must be a power of two.
/// Forward uses e^{-i2πkn/N}; inverse divides by N.
void fft_inplace(std::vector<std::complex<double>>& a, bool inverse);

/// Forward FFT of a real signal zero-padded to n_fft.
std::vector<std::complex<double>> fft_real(const double* x, std::size_t len,
                                           std::size_t n_fft);

bool is_power_of_two(std::size_t n);

}  // namespace advaudio
