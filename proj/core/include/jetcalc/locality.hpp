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

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "jetcalc/derivative.hpp"
#include "jetcalc/functional.hpp"
#include "jetcalc/grid.hpp"
#include "jetcalc/rng.hpp"

namespace jetcalc {

enum class Verdict { pass, fail, inconclusive };

std::string_view to_string(Verdict v);

struct TrialRecord {
  int trial;
  double residual;
  double scale;
};

/// Outcome of one probe. Per trial the ratio residual/scale is compared
/// with the tolerance: pass iff every ratio ≤ tolerance, fail iff some
/// ratio > 10·tolerance, inconclusive otherwise. max_residual and scale
/// belong to the worst trial.
struct ProbeReport {
  std::string functional;
  std::string test;
  int trials = 0;
  double max_residual = 0.0;
  double scale = 0.0;
  double tolerance = 0.0;
  Verdict verdict = Verdict::inconclusive;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> parameters;
  std::vector<TrialRecord> records;
  /// Operands of the worst trial.
  std::vector<Field> witness;
  std::string note;
  /// Filled by locality_verdict only.
  std::vector<ProbeReport> sub_reports;

  /// Sets trials, max_residual, scale and verdict from records.
  void finalize();
  double worst_ratio() const;
};

struct LocalityConfig {
  int trials = 50;
  /// Minimum separation of "disjoint" windows, in grid cells.
  double gap_cells = 8.0;
  double additivity_tol = 1e-9;
  double diagonal_tol = 1e-6;
  /// Normalizers below 1e-13 + this·max(1,|F(φ)|) count as an identically
  /// vanishing second derivative.
  double vanishing_kernel_tol = 1e-8;
  /// Energy fraction of ∇F_φ beyond 3/4 Nyquist.
  double tail_tol = 1e-8;
  double lipschitz_bound = 1e6;
  DerivativeConfig derivative;
};

/// Gaussian of width radius/9 and the given height, set to exactly 0
/// outside the window (where it is below 3e-18·height).
Field pulse(const SupportWindow& window, const GridSpec& grid, double height);

/// Smallest pulse radius whose Gaussian is resolved to rounding level:
/// max(0.6, 160/N).
double min_pulse_radius(const GridSpec& grid);

/// Two windows with radii in [min_pulse_radius, 1.2] whose gap is at least
/// gap_cells.
std::pair<SupportWindow, SupportWindow> draw_disjoint_windows(Rng& rng, const GridSpec& grid,
                                                              double gap_cells);

/// (|F(φ₁+φ₂+φ₃) − F(φ₁+φ₂) − F(φ₂+φ₃) + F(φ₂)|, max |F| over the four operands).
std::pair<double, double> additivity_residual(const Functional& F, const Field& phi1,
                                              const Field& phi2, const Field& phi3);

/// Hammerstein test. φ₁, φ₃ are pulses on disjoint windows; φ₂ is base when
/// given, else a random band-limited field per trial.
ProbeReport test_additivity(const Functional& F, const GridSpec& grid, int trials,
                            std::uint64_t seed, const LocalityConfig& cfg = {},
                            const std::optional<Field>& base = std::nullopt);

/// |F(φ₁+φ₂) − F(φ₁) − F(φ₂) + F(0)| over disjoint pulse pairs.
ProbeReport test_partial_additivity(const Functional& F, const GridSpec& grid, int trials,
                                    std::uint64_t seed, const LocalityConfig& cfg = {});

/// |D²F_φ(ψ, χ)| for disjoint pulses, normalized by max(|D²F_φ(ψ,ψ)|,
/// |D²F_φ(χ,χ)|). When every normalizer vanishes the kernel is zero, which
/// is diagonally supported: the verdict is pass with a note.
ProbeReport test_diagonal_support(const Functional& F, const Field& phi, int trials,
                                  std::uint64_t seed, const LocalityConfig& cfg = {});

/// Smoothness proxy: energy fraction of ∇F_φ beyond 3/4 Nyquist. A gradient
/// below the finite-difference noise floor passes with a note.
ProbeReport test_gradient_smoothness(const Functional& F, const Field& phi,
                                     const LocalityConfig& cfg = {});

/// Continuity proxy: ‖∇F_{φ+εv} − ∇F_φ‖ / (ε‖v‖) for a random unit v, ε = 1e-3.
ProbeReport test_gradient_continuity(const Functional& F, const Field& phi, std::uint64_t seed,
                                     const LocalityConfig& cfg = {});

/// Default φ-samples: two random band-limited fields of amplitude about 1
/// and the constant 1.
std::vector<Field> default_locality_samples(const GridSpec& grid, std::uint64_t seed);

/// Runs additivity, diagonal support, gradient smoothness and gradient
/// continuity at every sample. Verdict pass means "local", fail means
/// "nonlocal"; note names the failing conditions.
ProbeReport locality_verdict(const Functional& F, const std::vector<Field>& samples,
                             std::uint64_t seed, const LocalityConfig& cfg = {});

/// "local", "nonlocal" or "inconclusive".
std::string_view locality_label(Verdict v);

/// Additivity failure of F_nl at φ₂ = 1: two disjoint pulses with
/// ‖φᵢ‖²_{H²} = 0.9a keep F_nl(1+φᵢ) in the χ = 1 regime while
/// ‖φ₁+φ₃‖²_{H²} = 1.8a exceeds b, so F_nl(1+φ₁+φ₃) = ∫(1+φ₁+φ₃).
ProbeReport counterexample_witness(const GridSpec& grid, int power = 3);

/// One row per trial: functional,test,trial,residual,scale,ratio.
void write_probe_csv(std::ostream& out, const ProbeReport& report, bool header = true);

/// One-line summary.
std::string summarize(const ProbeReport& report);

}  // namespace jetcalc
