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

#include <iosfwd>
#include <span>
#include <vector>

#include "jetcalc/functional.hpp"
#include "jetcalc/grid.hpp"

namespace jetcalc {

enum class StepScale { absolute, relative };

/// Finite-difference settings. In relative mode the step along v is
/// base_step / (1 + ‖v‖_{C⁰}).
struct DerivativeConfig {
  double base_step = 1e-2;
  int richardson_levels = 3;
  StepScale scale_mode = StepScale::relative;
  /// For order k > 1 also run the table at base_step/10 and base_step^(2/(k+1))
  /// and keep the estimate with the smallest Neville error.
  bool adaptive_step = true;

  /// Throws PreconditionError unless base_step > 0 and levels ≥ 2.
  void validate() const;
};

struct DerivativeEstimate {
  double value;
  /// |T(L,L) − T(L−1,L−1)| from the Neville table.
  double error;
  int evaluations;
};

/// D^kF_φ(v_1, ..., v_k), 1 ≤ k ≤ 4, by mixed central differences over the
/// k-cube, halving the step between levels and extrapolating in h².
DerivativeEstimate gateaux_estimate(const Functional& F, const Field& phi,
                                    std::span<const Field> dirs, const DerivativeConfig& cfg = {});
double gateaux(const Functional& F, const Field& phi, std::span<const Field> dirs,
               const DerivativeConfig& cfg = {});

/// cos(nx) or sin(nx) sampled on the grid.
Field fourier_mode(const GridSpec& grid, int n, bool sine);

/// ∇F_φ with ∫∇F_φ v = DF_φ(v), synthesized from pairings with cos(nx) and
/// sin(nx) for n ≤ band_limit (default: Nyquist).
Field gradient(const Functional& F, const Field& phi, const DerivativeConfig& cfg = {},
               int band_limit = -1);

/// Density of v ↦ D²F_φ(v, w), from pairings D²F_φ(e_n, w).
Field second_gradient(const Functional& F, const Field& phi, const Field& w,
                      const DerivativeConfig& cfg = {}, int band_limit = -1);

/// D²F_φ(ψ, χ).
double kernel_probe2(const Functional& F, const Field& phi, const Field& psi, const Field& chi,
                     const DerivativeConfig& cfg = {});

/// Symbol coefficients p_0..p_k of the second-derivative kernel: the density
/// A_ξ of v ↦ D²F_φ(v, e^{iξx}) satisfies A_ξ(x) e^{-iξx} = Σ_j p_j(x)(iξ)^j.
/// For F = ∫ h u₀⁴ + g u₁² this gives (12hφ², −2g′, −2g).
struct KernelCoefficients {
  std::vector<Field> coefficients;
  /// Max over x of the least-squares residual norm.
  double residual;
};

/// Solves the system over ξ ∈ {−k_max, ..., k_max}; k_max ≤ 6.
KernelCoefficients extract_delta_coefficients(const Functional& F, const Field& phi, int k_max,
                                              const DerivativeConfig& cfg = {});

struct OrderEstimate {
  /// Least-squares slope of log|DF_φ(e^{iωx})| against log ω.
  double slope;
  std::vector<int> frequencies;
  std::vector<double> magnitudes;
  /// Frequencies whose pairing cleared the noise floor.
  std::vector<int> used;
};

/// Pairings below max(1e-13, 1e-11·(1+|F(φ)|)) are dropped. Fewer than two
/// survivors with at least one: slope 0 (no growth is observable). No
/// survivors: NumericalError ("order undefined").
OrderEstimate estimate_order(const Functional& F, const Field& phi, std::span<const int> freqs,
                             const DerivativeConfig& cfg = {});

// CSV: "x,value" for gradients; "x,p0,...,pk" for kernel coefficients.
void write_gradient_csv(std::ostream& out, const Field& gradient);
void write_kernel_coefficients_csv(std::ostream& out, const KernelCoefficients& k);

}  // namespace jetcalc
