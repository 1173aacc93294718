// Copyright 2026 The jetcalc Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace jetcalc::detail {

// Real-to-complex transform of length n into n/2+1 unnormalized
// coefficients Σ_j x_j e^{-2πi jk/n}.
void forward_fft(std::span<const double> in, std::span<std::complex<double>> out);

// Complex-to-real inverse (unnormalized). `in` is copied, never clobbered.
void inverse_fft(std::span<const std::complex<double>> in, std::span<double> out);

}  // namespace jetcalc::detail
